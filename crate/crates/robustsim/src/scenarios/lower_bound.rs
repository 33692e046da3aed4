//! The elimination learner against a random choice between two disjoint
//! length-`l` conjunctions: with few samples it usually sees no positive
//! example, outputs the full conjunction, and pays the disjoint-pair risk.

use rand::Rng;
use robustsim_core::hypercube::Point;
use robustsim_core::learners::learn_monotone_conjunction;
use robustsim_core::risk::{hoeffding_radius, DEFAULT_CONFIDENCE};
use robustsim_core::seed::derive_seed;
use robustsim_core::{Concept, Distribution, EvalMode, LabeledSample, RiskEngine, RiskKind};

use super::run_trials;
use crate::config::ScenarioConfig;
use crate::error::{ConfigResult, Constraints};
use crate::report::{Claim, Relation, ScenarioReport};

const CITATION: &str = "conjunctions of superlogarithmic length are not efficiently robustly learnable: with \
     targets drawn from two disjoint length-l conjunctions and m samples, the expected exact-in-ball risk of \
     the learner's output exceeds 0.1";
const CONTRAST_CITATION: &str =
    "at radius 0 the same learner succeeds: its expected standard risk is near 0";
const WHITE_BOX_CITATION: &str =
    "when every sampled label is 0 the elimination learner returns the conjunction of all variables";

pub fn lower_bound(cfg: &ScenarioConfig) -> ConfigResult<ScenarioReport> {
    let n = cfg.n.unwrap_or(64);
    let l = cfg.l.unwrap_or(16);
    let rho = cfg.rho.unwrap_or(l / 2);
    let m = cfg.m.unwrap_or(100);
    let trials = cfg.trials.unwrap_or(200);
    let risk_samples = cfg.risk_samples.unwrap_or(10_000);
    let seed = cfg.seed_or_default();

    let q = 1.0 - 0.5f64.powi(l as i32);
    let mut check = Constraints::default();
    check.require(l >= 1 && 2 * l <= n, || format!("need 1 <= l and 2l <= n, got l={l}, n={n}"));
    check.require(q.powf(2.0 * m as f64) >= 0.5, || {
        format!("need (1-2^-l)^(2m) >= 1/2, got {}", q.powf(2.0 * m as f64))
    });
    check.require(q / 2.0 > 5.0 / 12.0, || format!("need (1-2^-l)/2 > 5/12, got {}", q / 2.0));
    check.require(rho <= n, || format!("need rho <= n, got {rho}"));
    check.require(trials > 0 && risk_samples > 0, || "need trials > 0 and risk_samples > 0".into());
    check.finish()?;

    let mut resolved = cfg.clone();
    resolved.scenario = Some("lower-bound".into());
    resolved.n = Some(n);
    resolved.l = Some(l);
    resolved.rho = Some(rho);
    resolved.m = Some(m);
    resolved.trials = Some(trials);
    resolved.risk_samples = Some(risk_samples);
    resolved.seed = Some(seed);
    let mut report = ScenarioReport::new("lower-bound", resolved);

    let targets = [Concept::conjunction(n, 0..l)?, Concept::conjunction(n, l..2 * l)?];
    let dist = Distribution::<f64>::uniform(n)?;
    let engine = RiskEngine::default();
    let trial_seed = derive_seed(seed, 1);
    let risk_seed = derive_seed(seed, 2);

    struct Trial {
        all_zero: bool,
        full_output: bool,
        risk_rho: f64,
        risk_zero: f64,
    }
    let outcomes = run_trials(trials, trial_seed, |rng| {
        let target = &targets[usize::from(rng.gen_bool(0.5))];
        let pts: Vec<Point> = (0..m).map(|_| dist.sample(rng)).collect();
        let sample = LabeledSample::labeled_by(target, pts)?;
        let h = learn_monotone_conjunction(&sample);
        // one stream per trial, derived from the first draw after sampling
        let stream = rng.gen::<u64>();
        let curve = engine.risk_curve(
            RiskKind::ExactInBall,
            &h,
            target,
            &dist,
            rho,
            EvalMode::MonteCarlo {
                samples: risk_samples,
                seed: derive_seed(risk_seed, stream),
            },
        )?;
        Ok(Trial {
            all_zero: sample.labels().iter().all(|&y| !y),
            full_output: h.len() == n,
            risk_rho: curve[rho].value,
            risk_zero: curve[0].value,
        })
    })?;

    let mean = |f: fn(&Trial) -> f64| outcomes.iter().map(f).sum::<f64>() / trials as f64;
    let mean_rho = mean(|t| t.risk_rho);
    let mean_zero = mean(|t| t.risk_zero);
    let zero_trials = outcomes.iter().filter(|t| t.all_zero).count();
    let white_box = outcomes.iter().filter(|t| t.all_zero).all(|t| t.full_output);
    let trial_radius = hoeffding_radius(trials, DEFAULT_CONFIDENCE);
    let sample_radius = hoeffding_radius(risk_samples, DEFAULT_CONFIDENCE);
    let ci = trial_radius + sample_radius;

    report.measure("mean_risk", mean_rho);
    report.measure("mean_standard_risk", mean_zero);
    report.measure("all_zero_label_fraction", zero_trials as f64 / trials as f64);
    report.measure("combined_confidence_radius", ci);
    report.measure("trial_confidence_radius", trial_radius);
    report.measure("risk_sample_confidence_radius", sample_radius);

    report.claim(Claim::holds("all_zero_gives_full_conjunction", WHITE_BOX_CITATION, white_box));
    if 2 * rho >= l {
        report.claim(Claim::new("mean_risk", CITATION, mean_rho, Relation::Greater, 0.1, -3.0 * ci));
    } else {
        report.note(format!(
            "rho = {rho} < l/2: the risk lower bound does not apply; only the radius-0 contrast is checked"
        ));
    }
    report.claim(Claim::at_most("mean_standard_risk", CONTRAST_CITATION, mean_zero, 0.01, ci));
    Ok(report)
}
