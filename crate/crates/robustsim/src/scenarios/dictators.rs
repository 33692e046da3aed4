//! Two dictators that agree on every sample.
//!
//! Under a distribution that copies bit 0 onto bit 1, the targets `x_0` and
//! `x_1` label every sample identically, so a learner's output cannot depend
//! on which one was chosen, and since one flip separates them the average
//! exact-in-ball risk at radius 1 is at least 1/2.

use robustsim_core::distributions::Coupled;
use robustsim_core::hypercube::Point;
use robustsim_core::learners::{exact_learn_membership, learn_monotone_conjunction};
use robustsim_core::risk::hoeffding_radius;
use robustsim_core::seed::derive_seed;
use robustsim_core::{Classifier, Concept, Distribution, EvalMode, LabeledSample, RiskEngine};

use super::run_trials;
use crate::config::ScenarioConfig;
use crate::error::{ConfigResult, Constraints};
use crate::report::{Claim, ScenarioReport};

const CITATION: &str = "dictators are not robustly learnable at radius 1: for targets x_0, x_1 under a \
     distribution forcing x_0 = x_1, the expected exact-in-ball risk at radius 1 is at least 1/2";
const LABELS_CITATION: &str =
    "both dictators give every sampled point the same label, so the sample carries no information about the target";
const MEMBERSHIP_CITATION: &str =
    "with membership queries the target is learned exactly, so its robust risk is 0";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LearnerKind {
    Elimination,
    Constant(bool),
    Membership,
}

fn parse_learner(name: &str) -> Option<LearnerKind> {
    match name {
        "elimination" => Some(LearnerKind::Elimination),
        "const0" => Some(LearnerKind::Constant(false)),
        "const1" => Some(LearnerKind::Constant(true)),
        "membership" => Some(LearnerKind::Membership),
        _ => None,
    }
}

fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    // pmf by the multiplicative recurrence; fine for n in the hundreds
    let mut out = vec![0.0; n as usize + 1];
    if p <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if p >= 1.0 {
        out[n as usize] = 1.0;
        return out;
    }
    let ln = |k: u64| -> f64 {
        let lc: f64 = (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum();
        lc + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()
    };
    for k in 0..=n {
        out[k as usize] = ln(k).exp();
    }
    out
}

pub fn dictators(cfg: &ScenarioConfig) -> ConfigResult<ScenarioReport> {
    let n = cfg.n.unwrap_or(6);
    let m = cfg.m.unwrap_or(20);
    let trials = cfg.trials.unwrap_or(200);
    let seed = cfg.seed_or_default();
    let learner_name = cfg.learner.clone().unwrap_or_else(|| "elimination".into());
    let learner = parse_learner(&learner_name);

    let mut check = Constraints::default();
    check.require(n >= 3, || format!("need n >= 3, got {n}"));
    check.require(n <= 20, || format!("exact risks need n <= 20, got {n}"));
    check.require(learner.is_some(), || {
        format!("unknown learner {learner_name:?} (elimination, const0, const1, membership)")
    });
    check.require(trials > 0, || "need trials > 0".into());
    check.finish()?;
    let learner = learner.expect("checked");

    let mut resolved = cfg.clone();
    resolved.scenario = Some("dictators".into());
    resolved.n = Some(n);
    resolved.m = Some(m);
    resolved.trials = Some(trials);
    resolved.seed = Some(seed);
    resolved.learner = Some(learner_name);
    let mut report = ScenarioReport::new("dictators", resolved);

    let dist = Distribution::<f64>::Coupled(Coupled::fair_pair(n, 0, 1)?);
    let targets = [Concept::dictator(n, 0)?, Concept::dictator(n, 1)?];
    let engine = RiskEngine::default();
    let risk = |h: &dyn Classifier, c: &Concept| -> ConfigResult<f64> {
        Ok(engine.exact_in_ball_risk(h, c, &dist, 1, EvalMode::Exact)?.value)
    };
    let avg_risk = |h: &dyn Classifier| -> ConfigResult<f64> {
        Ok((risk(h, &targets[0])? + risk(h, &targets[1])?) / 2.0)
    };

    // Exact expectation over targets and samples.
    let expected = match learner {
        LearnerKind::Constant(b) => avg_risk(&Concept::constant(n, b)?)?,
        LearnerKind::Membership => {
            let mut total = 0.0;
            for c in &targets {
                let (h, queries) = exact_learn_membership(|x| c.eval(x), n)?;
                report.measure("membership_queries", queries as u64);
                total += risk(&h, c)?;
            }
            total / 2.0
        }
        LearnerKind::Elimination => {
            // Positive examples are those with x_0 = x_1 = 1, P ~ Bin(m, 1/2);
            // given P = p, each of the other n - 2 fair bits survives
            // elimination with probability 2^-p. Bits 2.. are exchangeable,
            // so the risk depends only on how many survive.
            let by_survivors = (0..=n - 2)
                .map(|t| {
                    let h = Concept::conjunction(n, 0..t + 2)?;
                    avg_risk(&h)
                })
                .collect::<ConfigResult<Vec<f64>>>()?;
            let positives = binomial_pmf(m, 0.5);
            let mut e = 0.0;
            for (p, &wp) in positives.iter().enumerate() {
                let survive = 0.5f64.powi(p as i32);
                let counts = binomial_pmf((n - 2) as u64, survive);
                e += wp * counts.iter().zip(&by_survivors).map(|(w, r)| w * r).sum::<f64>();
            }
            e
        }
    };
    report.measure("expected_risk_exact", expected);

    // Sampled trials: identical labels under both targets, and the per-sample
    // average over targets is already at least 1/2.
    let trial_seed = derive_seed(seed, 1);
    let outcomes = run_trials(trials, trial_seed, |rng| {
        let pts: Vec<Point> = (0..m).map(|_| dist.sample(rng)).collect();
        let same = pts.iter().all(|x| targets[0].eval(x) == targets[1].eval(x));
        let sample = LabeledSample::labeled_by(&targets[0], pts)?;
        let r = match learner {
            LearnerKind::Elimination => avg_risk(&learn_monotone_conjunction(&sample))?,
            LearnerKind::Constant(b) => avg_risk(&Concept::constant(n, b)?)?,
            LearnerKind::Membership => expected,
        };
        Ok((same, r))
    })?;
    let all_same = outcomes.iter().all(|o| o.0);
    let min_trial = outcomes.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    let mean_trial = outcomes.iter().map(|o| o.1).sum::<f64>() / trials as f64;
    let radius = hoeffding_radius(trials, engine.confidence);
    report.measure("trial_mean_risk", mean_trial);
    report.measure("trial_min_risk", min_trial);
    report.measure("trial_confidence_radius", radius);

    report.claim(Claim::holds("identical_labels", LABELS_CITATION, all_same));
    if learner == LearnerKind::Membership {
        report.claim(Claim::equal("membership_risk", MEMBERSHIP_CITATION, expected, 0.0, 0.0));
    } else {
        report.claim(Claim::at_least("expected_risk", CITATION, expected, 0.5, 0.0));
        report.claim(Claim::at_least("per_sample_risk", CITATION, min_trial, 0.5, 0.0));
        report.claim(Claim::equal(
            "trial_mean_matches_exact",
            "sampled trials agree with the exact expectation within the Hoeffding radius",
            mean_trial,
            expected,
            radius,
        ));
    }
    Ok(report)
}
