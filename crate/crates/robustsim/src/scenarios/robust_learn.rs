//! Robust learning of monotone conjunctions under log-Lipschitz product
//! distributions, split the way the analysis splits it: short targets are
//! recovered exactly, long targets are almost never satisfiable within the
//! radius, so the full-conjunction output is already robustly accurate.

use rand::seq::index::sample;
use robustsim_core::adversary::min_flips_to_satisfy;
use robustsim_core::learners::{claim1_sample_size, learn_monotone_conjunction, robust_sample_size};
use robustsim_core::risk::{hoeffding_radius, DEFAULT_CONFIDENCE};
use robustsim_core::seed::derive_seed;
use robustsim_core::{
    Concept, Distribution, EvalMode, LabeledSample, LearnParams, MonotoneConjunction, RiskEngine,
};

use super::{mc_count, run_trials};
use crate::config::ScenarioConfig;
use crate::error::{ConfigError, ConfigResult, Constraints};
use crate::report::{Claim, ScenarioReport};

const SHORT_CITATION: &str = "with m = ceil((ln n - ln delta)/eta^(l+1)) samples the elimination learner returns a \
     length-l target exactly with probability at least 1 - delta";
const LONG_CITATION: &str = "for a target of length l >= (8/eta^2) ln(1/eps) and rho <= eta l/2, a point drawn \
     from an alpha-log-Lipschitz distribution can be pushed into the target within rho flips with probability \
     at most eps";
const RISK_CITATION: &str = "the learned conjunction contains the target, so a disagreement within the ball \
     needs a point satisfying the target; its exact-in-ball risk is at most eps";
const SUPERSET_CITATION: &str = "elimination never removes a target variable";

fn product(n: usize, bias: f64, alpha: f64) -> ConfigResult<Distribution> {
    let d = Distribution::<f64>::product(vec![bias; n])?;
    if !d.verify_log_lipschitz(alpha)?.holds() {
        return Err(ConfigError::Constraints(vec![format!(
            "product distribution with bias {bias} is not {alpha}-log-Lipschitz"
        )]));
    }
    Ok(d)
}

pub fn robust_learn(cfg: &ScenarioConfig) -> ConfigResult<ScenarioReport> {
    let alpha = cfg.alpha.unwrap_or(1.0);
    let eta = 1.0 / (1.0 + alpha);
    let bias = cfg.bias.unwrap_or(alpha / (1.0 + alpha));
    let n = cfg.n.unwrap_or(16);
    let l = cfg.l.unwrap_or(3);
    let delta = cfg.delta.unwrap_or(0.1);
    let epsilon = cfg.epsilon.unwrap_or(0.25);
    let trials = cfg.trials.unwrap_or(200);
    let seed = cfg.seed_or_default();
    let l_long_min = 8.0 / (eta * eta) * (1.0 / epsilon).ln();
    let long_l = cfg.long_l.unwrap_or(l_long_min.ceil() as usize);
    let long_n = cfg.long_n.unwrap_or(long_l.next_power_of_two().max(128));
    let rho = cfg.rho.unwrap_or((eta * long_l as f64 / 2.0).floor() as usize);
    let m_long = cfg.m.unwrap_or(500);
    let risk_samples = cfg.risk_samples.unwrap_or(100_000);

    let mut check = Constraints::default();
    check.require(alpha >= 1.0, || format!("need alpha >= 1, got {alpha}"));
    check.require(bias > 0.0 && bias < 1.0, || format!("need 0 < bias < 1, got {bias}"));
    check.require(l >= 1 && l <= n, || format!("need 1 <= l <= n, got l={l}, n={n}"));
    check.require(long_l <= long_n, || format!("need long_l <= long_n, got {long_l} > {long_n}"));
    check.require(long_l as f64 >= l_long_min, || {
        format!("need long_l >= (8/eta^2) ln(1/eps) = {l_long_min:.3}, got {long_l}")
    });
    check.require(rho as f64 <= eta * long_l as f64 / 2.0, || {
        format!("need rho <= eta*long_l/2 = {}, got {rho}", eta * long_l as f64 / 2.0)
    });
    check.require(trials > 0 && risk_samples > 0, || "need trials > 0 and risk_samples > 0".into());
    check.finish()?;
    let params = LearnParams::new(epsilon, delta, long_n, alpha)?;
    let m_short = claim1_sample_size(n, delta, eta, l as u64)?;
    let m_short = match m_short.as_u64() {
        Some(v) if m_short.practical => v,
        _ => {
            return Err(ConfigError::Constraints(vec![format!(
                "short-target sample size {m_short} is impractical"
            )]))
        }
    };
    let short_dist = product(n, bias, alpha)?;
    let long_dist = product(long_n, bias, alpha)?;

    let mut resolved = cfg.clone();
    resolved.scenario = Some("robust-learn".into());
    resolved.alpha = Some(alpha);
    resolved.bias = Some(bias);
    resolved.n = Some(n);
    resolved.l = Some(l);
    resolved.delta = Some(delta);
    resolved.epsilon = Some(epsilon);
    resolved.trials = Some(trials);
    resolved.seed = Some(seed);
    resolved.long_l = Some(long_l);
    resolved.long_n = Some(long_n);
    resolved.rho = Some(rho);
    resolved.m = Some(m_long);
    resolved.risk_samples = Some(risk_samples);
    let mut report = ScenarioReport::new("robust-learn", resolved);

    let formula = robust_sample_size(&params)?;
    report.measure("eta", eta);
    report.measure("length_threshold", formula.l0);
    report.measure("formula_sample_size", formula.size.to_string());
    report.measure("formula_sample_size_practical", formula.size.practical);
    if (l as u64) > formula.l0 {
        report.note(format!("l = {l} exceeds the length threshold {}; exact recovery is not promised", formula.l0));
    }

    // short targets: exact recovery
    let recovered = run_trials(trials, derive_seed(seed, 1), |rng| {
        let vars = sample(rng, n, l).into_vec();
        let target = Concept::conjunction(n, vars)?;
        let pts = (0..m_short).map(|_| short_dist.sample(rng)).collect();
        let s = LabeledSample::labeled_by(&target, pts)?;
        Ok(Concept::MonotoneConjunction(learn_monotone_conjunction(&s)) == target)
    })?;
    let freq = recovered.iter().filter(|&&b| b).count() as f64 / trials as f64;
    report.measure("short_sample_size", m_short);
    report.measure("short_recovery_frequency", freq);
    report.measure("short_confidence_radius", hoeffding_radius(trials, DEFAULT_CONFIDENCE));
    report.claim(Claim::at_least("short_recovery", SHORT_CITATION, freq, 1.0 - delta - 0.05, 0.0));

    // long targets: satisfiability within the ball, then the learned risk
    let mut rng = robustsim_core::seed::stream_rng(seed, 2);
    let target = MonotoneConjunction::new(long_n, sample(&mut rng, long_n, long_l).into_vec())?;
    let hits = mc_count(risk_samples, derive_seed(seed, 3), |rng| {
        min_flips_to_satisfy(&target, &long_dist.sample(rng)) <= rho
    });
    let radius = hoeffding_radius(risk_samples, DEFAULT_CONFIDENCE);
    let p_sat = hits as f64 / risk_samples as f64;
    report.measure("long_satisfiable_probability", p_sat);
    report.measure("long_confidence_radius", radius);
    report.claim(Claim::at_most("long_satisfiable", LONG_CITATION, p_sat, epsilon, radius));

    let pts = (0..m_long).map(|_| long_dist.sample(&mut rng)).collect();
    let s = LabeledSample::labeled_by(&target.clone().into_concept(), pts)?;
    let h = learn_monotone_conjunction(&s);
    report.claim(Claim::holds(
        "learned_contains_target",
        SUPERSET_CITATION,
        target.vars().iter().all(|&i| h.contains(i)),
    ));
    let risk = RiskEngine::default().exact_in_ball_risk(
        &h,
        &target,
        &long_dist,
        rho,
        EvalMode::MonteCarlo {
            samples: risk_samples,
            seed: derive_seed(seed, 4),
        },
    )?;
    report.measure("long_learned_size", h.len() as u64);
    report.measure("long_robust_risk", risk.value);
    report.claim(Claim::at_most("long_robust_risk", RISK_CITATION, risk.value, epsilon, risk.confidence_radius));
    Ok(report)
}
