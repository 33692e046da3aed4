//! Disjoint conjunctions of length `l` are far apart in exact-in-ball risk
//! once the radius reaches `l/2`.

use robustsim_core::hypercube::{binomial, cube};
use robustsim_core::seed::derive_seed;
use robustsim_core::{Classifier, Concept, Distribution, EvalMode, RiskEngine};

use crate::config::{Mode, ScenarioConfig};
use crate::error::{ConfigResult, Constraints};
use crate::report::{Claim, ScenarioReport};

const RISK_CITATION: &str = "two disjoint length-l monotone conjunctions under the uniform distribution have \
     exact-in-ball risk at least (1 - 2^-l)/2 at any radius rho >= l/2";
const EVENT_CITATION: &str = "the event {c1(x) = 0 and at least l/2 ones on the variables of c2} has probability \
     (1 - 2^-l) times the binomial upper tail, which is exactly (1 - 2^-l)/2 for odd l and larger for even l";
const CONTAIN_CITATION: &str =
    "on that event at most l/2 flips satisfy c2 while c1 stays 0, so the event lies inside the risk event";

/// `Pr[Bin(l, 1/2) >= l/2]`, computed from exact binomial coefficients.
pub fn upper_half_tail(l: usize) -> f64 {
    let num: f64 = (0..=l)
        .filter(|&j| 2 * j >= l)
        .map(|j| binomial(l, j).to_string().parse::<f64>().expect("finite"))
        .sum();
    num / 2f64.powi(l as i32)
}

pub fn disjoint_conj(cfg: &ScenarioConfig) -> ConfigResult<ScenarioReport> {
    let n = cfg.n.unwrap_or(12);
    let l = cfg.l.unwrap_or(4);
    let rho = cfg.rho.unwrap_or(l.div_ceil(2));
    let seed = cfg.seed_or_default();
    let mode = cfg.mode.unwrap_or(Mode::Exact);
    let risk_samples = cfg.risk_samples.unwrap_or(100_000);

    let mut check = Constraints::default();
    check.require(l >= 3, || format!("need l >= 3, got {l}"));
    check.require(2 * l <= n, || format!("need 2l <= n, got l={l}, n={n}"));
    check.require(2 * rho >= l, || format!("need rho >= l/2, got rho={rho}, l={l}"));
    check.require(rho <= n, || format!("need rho <= n, got rho={rho}"));
    check.require(mode == Mode::Mc || n <= 20, || format!("exact mode needs n <= 20, got {n}"));
    check.finish()?;

    let mut resolved = cfg.clone();
    resolved.scenario = Some("disjoint-conj".into());
    resolved.n = Some(n);
    resolved.l = Some(l);
    resolved.rho = Some(rho);
    resolved.seed = Some(seed);
    resolved.mode = Some(mode);
    if mode == Mode::Mc {
        resolved.risk_samples = Some(risk_samples);
    }
    let mut report = ScenarioReport::new("disjoint-conj", resolved);

    let c1 = Concept::conjunction(n, 0..l)?;
    let c2 = Concept::conjunction(n, l..2 * l)?;
    let dist = Distribution::<f64>::uniform(n)?;
    let engine = RiskEngine::default();
    let eval_mode = match mode {
        Mode::Exact => EvalMode::Exact,
        Mode::Mc => EvalMode::MonteCarlo {
            samples: risk_samples,
            seed: derive_seed(seed, 1),
        },
    };
    let risk = engine.exact_in_ball_risk(&c1, &c2, &dist, rho, eval_mode)?;
    let bound = (1.0 - 0.5f64.powi(l as i32)) / 2.0;
    report.measure("risk", risk.value);
    report.measure("risk_confidence_radius", risk.confidence_radius);
    report.measure("bound", bound);
    report.claim(Claim::at_least("risk", RISK_CITATION, risk.value, bound, risk.confidence_radius));

    let closed_form = (1.0 - 0.5f64.powi(l as i32)) * upper_half_tail(l);
    report.measure("event_probability", closed_form);
    if l % 2 == 1 {
        report.claim(Claim::equal("event_probability", EVENT_CITATION, closed_form, bound, 1e-12));
    } else {
        report.claim(Claim::at_least("event_probability", EVENT_CITATION, closed_form, bound, 0.0));
        report.note("even l: the binomial tail includes the middle term, so the event probability exceeds (1-2^-l)/2");
    }
    if n <= 20 {
        // direct count over the cube, independent of the closed form
        let hits = cube(n)?
            .filter(|x| !c1.eval(x) && 2 * (l..2 * l).filter(|&i| x.get(i)).count() >= l)
            .count();
        let enumerated = hits as f64 / 2f64.powi(n as i32);
        report.measure("event_probability_enumerated", enumerated);
        report.claim(Claim::equal(
            "event_enumeration_matches_closed_form",
            EVENT_CITATION,
            enumerated,
            closed_form,
            1e-12,
        ));
    }
    report.claim(Claim::at_least(
        "risk_contains_event",
        CONTAIN_CITATION,
        risk.value,
        closed_form,
        risk.confidence_radius,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails() {
        assert_eq!(upper_half_tail(5), 0.5);
        assert_eq!(upper_half_tail(4), 11.0 / 16.0);
        assert_eq!(upper_half_tail(1), 0.5);
    }
}
