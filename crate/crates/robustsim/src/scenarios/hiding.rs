//! Non-trivial pairs can be hidden from a learner: bias the relevant bits
//! toward a point where the two concepts agree but one flip separates them.

use robustsim_core::distributions::build_hiding_distribution;
use robustsim_core::risk::hoeffding_radius;
use robustsim_core::seed::derive_seed;
use robustsim_core::{Classifier, Concept, Error, EvalMode, RiskEngine};

use super::run_trials;
use crate::config::{Mode, ScenarioConfig};
use crate::error::{ConfigError, ConfigResult, Constraints};
use crate::report::{Claim, ScenarioReport};

const AGREE_CITATION: &str = "under the hiding distribution, m samples see no disagreement between the two \
     concepts with probability at least (1-eta)^(m|I|), I the union of relevant variables";
const RISK_CITATION: &str =
    "under the hiding distribution the exact-in-ball risk at radius 1 between the pair is at least (1-eta)^|I|";

pub fn nontrivial_hiding(cfg: &ScenarioConfig) -> ConfigResult<ScenarioReport> {
    let n = cfg.n.unwrap_or(8);
    let m = cfg.m.unwrap_or(50);
    let eta = cfg.eta.unwrap_or(0.02);
    let trials = cfg.trials.unwrap_or(10_000);
    let seed = cfg.seed_or_default();
    let mode = cfg.mode.unwrap_or(Mode::Exact);
    let risk_samples = cfg.risk_samples.unwrap_or(100_000);
    let c1_text = cfg.c1.clone().unwrap_or_else(|| "conj:0".into());
    let c2_text = cfg.c2.clone().unwrap_or_else(|| "conj:1".into());

    let mut check = Constraints::default();
    check.require(eta > 0.0 && eta < 0.5, || format!("need 0 < eta < 1/2, got {eta}"));
    check.require(mode == Mode::Mc || n <= 16, || format!("exact mode needs n <= 16, got {n}"));
    check.require(n <= 24, || format!("the hiding construction scans the cube; need n <= 24, got {n}"));
    check.require(trials > 0, || "need trials > 0".into());
    check.finish()?;
    let c1 = Concept::parse(&c1_text, n)?;
    let c2 = Concept::parse(&c2_text, n)?;
    let (dist, z) = match build_hiding_distribution::<f64>(&c1, &c2, eta) {
        Err(Error::TrivialPair) => {
            return Err(ConfigError::Constraints(vec![format!(
                "{c1_text} and {c2_text} differ by no single relevant flip at any agreeing point (trivial pair)"
            )]))
        }
        other => other?,
    };
    let mut relevant = c1.relevant_variables();
    relevant.extend(c2.relevant_variables());
    relevant.sort_unstable();
    relevant.dedup();
    let size_i = relevant.len() as i32;

    let mut resolved = cfg.clone();
    resolved.scenario = Some("nontrivial-hiding".into());
    resolved.n = Some(n);
    resolved.m = Some(m);
    resolved.eta = Some(eta);
    resolved.trials = Some(trials);
    resolved.seed = Some(seed);
    resolved.mode = Some(mode);
    resolved.c1 = Some(c1_text);
    resolved.c2 = Some(c2_text);
    if mode == Mode::Mc {
        resolved.risk_samples = Some(risk_samples);
    }
    let mut report = ScenarioReport::new("nontrivial-hiding", resolved);
    report.measure("anchor_point", z.to_string());
    report.measure("relevant_variables", relevant.len() as u64);

    let engine = RiskEngine::default();
    let confidence = engine.confidence;
    let bound_a = (1.0 - eta).powi(size_i).powf(m as f64);
    report.measure("agreement_bound", bound_a);

    // exact per-point agreement, when the cube is small enough
    if n <= 20 {
        let p_agree: f64 = dist
            .support()?
            .iter()
            .filter(|(x, _)| c1.eval(x) == c2.eval(x))
            .map(|s| s.1)
            .sum();
        let exact_all = p_agree.powf(m as f64);
        report.measure("agreement_per_point_exact", p_agree);
        report.measure("agreement_all_exact", exact_all);
        report.claim(Claim::at_least("agreement_exact_bound", AGREE_CITATION, exact_all, bound_a, 0.0));
    }

    let hits = run_trials(trials, derive_seed(seed, 1), |rng| {
        Ok((0..m).all(|_| {
            let x = dist.sample(rng);
            c1.eval(&x) == c2.eval(&x)
        }))
    })?;
    let freq = hits.iter().filter(|&&b| b).count() as f64 / trials as f64;
    let radius = hoeffding_radius(trials, confidence);
    report.measure("agreement_frequency", freq);
    report.measure("agreement_confidence_radius", radius);
    report.claim(Claim::at_least("agreement_frequency", AGREE_CITATION, freq, bound_a, radius));
    if let Some(exact_all) = report.measured_f64("agreement_all_exact") {
        report.claim(Claim::equal(
            "agreement_frequency_matches_exact",
            "empirical agreement frequency lies within the Hoeffding radius of its exact value",
            freq,
            exact_all,
            radius,
        ));
    }

    let eval_mode = match mode {
        Mode::Exact => EvalMode::Exact,
        Mode::Mc => EvalMode::MonteCarlo {
            samples: risk_samples,
            seed: derive_seed(seed, 2),
        },
    };
    let r = engine.exact_in_ball_risk(&c1, &c2, &dist, 1, eval_mode)?;
    let bound_b = (1.0 - eta).powi(size_i);
    report.measure("risk_e1", r.value);
    report.measure("risk_e1_bound", bound_b);
    report.claim(Claim::at_least("risk_e1", RISK_CITATION, r.value, bound_b, r.confidence_radius));
    Ok(report)
}
