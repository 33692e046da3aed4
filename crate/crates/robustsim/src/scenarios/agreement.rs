//! Small samples rarely contain a positive example of either of two long
//! disjoint conjunctions, so both targets label the whole sample 0.

use robustsim_core::hypercube::Point;
use robustsim_core::learners::lemma5_max_sample_size;
use robustsim_core::risk::{hoeffding_radius, DEFAULT_CONFIDENCE};
use robustsim_core::seed::derive_seed;
use robustsim_core::{Classifier, Concept};

use super::run_trials;
use crate::config::ScenarioConfig;
use crate::error::{ConfigResult, Constraints};
use crate::report::{Claim, ScenarioReport};

const EXACT_CITATION: &str = "for disjoint length-l conjunctions under the uniform distribution, m samples are \
     all labeled 0 by both with probability exactly (1 - 2^-l)^(2m)";
const HALF_CITATION: &str =
    "while (1 - 2^-l)^(2m) >= 1/2 both conjunctions label the whole sample 0 with probability at least 1/2";

pub fn agreement(cfg: &ScenarioConfig) -> ConfigResult<ScenarioReport> {
    let n = cfg.n.unwrap_or(64);
    let l = cfg.l.unwrap_or(16);
    let m = cfg.m.unwrap_or(100);
    let trials = cfg.trials.unwrap_or(10_000);
    let seed = cfg.seed_or_default();

    let mut check = Constraints::default();
    check.require(l >= 1, || "need l >= 1".into());
    check.require(2 * l <= n, || format!("need 2l <= n, got l={l}, n={n}"));
    check.require(trials > 0, || "need trials > 0".into());
    check.finish()?;
    let m_max = lemma5_max_sample_size(l as u32)?;
    let mut check = Constraints::default();
    check.require(m <= m_max, || format!("need m <= {m_max} for l={l}, got m={m}"));
    check.finish()?;

    let mut resolved = cfg.clone();
    resolved.scenario = Some("agreement".into());
    resolved.n = Some(n);
    resolved.l = Some(l);
    resolved.m = Some(m);
    resolved.trials = Some(trials);
    resolved.seed = Some(seed);
    let mut report = ScenarioReport::new("agreement", resolved);
    report.measure("max_sample_size", m_max);

    let c1 = Concept::conjunction(n, 0..l)?;
    let c2 = Concept::conjunction(n, l..2 * l)?;
    let hits = run_trials(trials, derive_seed(seed, 1), |rng| {
        Ok((0..m).all(|_| {
            let x = Point::random(n, rng).expect("n validated");
            !c1.eval(&x) && !c2.eval(&x)
        }))
    })?;
    let freq = hits.iter().filter(|&&b| b).count() as f64 / trials as f64;
    let radius = hoeffding_radius(trials, DEFAULT_CONFIDENCE);
    let exact = (1.0 - 0.5f64.powi(l as i32)).powf(2.0 * m as f64);
    report.measure("frequency", freq);
    report.measure("confidence_radius", radius);
    report.measure("exact_probability", exact);

    report.claim(Claim::equal("frequency_matches_exact", EXACT_CITATION, freq, exact, radius));
    report.claim(Claim::at_least("exact_at_least_half", HALF_CITATION, exact, 0.5, 0.0));
    report.claim(Claim::at_least("frequency_at_least_half", HALF_CITATION, freq, 0.5, radius));
    Ok(report)
}
