//! Acceptance criteria, run in sequence so wall-clock limits are meaningful.
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::time::{Duration, Instant};

use robustsim::checks::{self, CheckOutcome};
use robustsim::scenarios;
use robustsim::{Mode, ScenarioConfig, ScenarioReport};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, u64, Box<dyn Fn() -> Outcome>);

fn claim_ok(r: &ScenarioReport, name: &str) -> Result<bool, String> {
    r.claim_named(name)
        .map(|c| c.pass)
        .ok_or_else(|| format!("{} has no claim {name}", r.scenario))
}

fn measured(r: &ScenarioReport, name: &str) -> Result<f64, String> {
    r.measured_f64(name).ok_or_else(|| format!("{} has no measurement {name}", r.scenario))
}

fn run(name: &str, cfg: ScenarioConfig) -> Result<ScenarioReport, String> {
    scenarios::run(name, &cfg).map_err(|e| e.to_string())
}

fn from_check(o: CheckOutcome) -> Outcome {
    Ok((o.pass, o.detail))
}

fn c1_dictators() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for learner in ["elimination", "const0", "const1"] {
        let r = run("dictators", ScenarioConfig::new().n(6).m(20).learner(learner))?;
        let exact = measured(&r, "expected_risk_exact")?;
        // exact computation, no slack
        let pass = exact >= 0.5 && claim_ok(&r, "expected_risk")? && claim_ok(&r, "identical_labels")?;
        ok &= pass;
        parts.push(format!("{learner} {exact:.6}"));
    }
    Ok((ok, format!("exact E[R^E_1] >= 0.5: {}", parts.join(", "))))
}

fn c2_disjoint() -> Outcome {
    let even = run("disjoint-conj", ScenarioConfig::new().n(12).l(4).rho(2).mode(Mode::Exact))?;
    let risk = measured(&even, "risk")?;
    let odd = run("disjoint-conj", ScenarioConfig::new().n(12).l(5).rho(3).mode(Mode::Exact))?;
    let event = measured(&odd, "event_probability")?;
    let counted = measured(&odd, "event_probability_enumerated")?;
    let ok = risk >= 0.46875
        && claim_ok(&even, "risk")?
        && (event - 0.484375).abs() <= 1e-12
        && (counted - 0.484375).abs() <= 1e-12;
    Ok((ok, format!("R^E_2 = {risk} (>= 0.46875); odd-l event = {event} (0.484375 +- 1e-12)")))
}

fn c3_agreement() -> Outcome {
    let r = run("agreement", ScenarioConfig::new().n(64).l(16).m(100).trials(10_000))?;
    let freq = measured(&r, "frequency")?;
    let radius = measured(&r, "confidence_radius")?;
    let exact = (1.0 - 2f64.powi(-16)).powi(200);
    let expected_radius = (2.0f64 / 0.01).ln() / (2.0 * 10_000.0);
    let ok = (freq - exact).abs() <= radius && (radius - expected_radius.sqrt()).abs() < 1e-12;
    Ok((ok, format!("frequency {freq} vs {exact:.5} (radius {radius:.4})")))
}

fn c4_lower_bound() -> Outcome {
    let r = run(
        "lower-bound",
        ScenarioConfig::new().n(64).l(16).rho(8).m(100).trials(200).risk_samples(10_000),
    )?;
    let mean = measured(&r, "mean_risk")?;
    let ci = measured(&r, "combined_confidence_radius")?;
    let ok = mean - 0.1 >= 3.0 * ci && claim_ok(&r, "mean_risk")?;
    Ok((ok, format!("mean R^E_8 = {mean:.4}, margin {:.4} >= 3 x CI {ci:.4}", mean - 0.1)))
}

fn c5_robust_learn() -> Outcome {
    let r = run("robust-learn", ScenarioConfig::new().n(16).l(3).alpha(1.0).delta(0.1).trials(200))?;
    let m = measured(&r, "short_sample_size")?;
    let freq = measured(&r, "short_recovery_frequency")?;
    let p = measured(&r, "long_satisfiable_probability")?;
    let radius = measured(&r, "long_confidence_radius")?;
    let cfg = &r.config;
    let shape = cfg.long_n == Some(128) && cfg.long_l == Some(45) && cfg.rho == Some(11);
    let shape = shape && cfg.risk_samples == Some(100_000);
    let ok = m == 82.0 && shape && freq >= 1.0 - 0.1 - 0.05 && p <= 0.25 + radius;
    Ok((
        ok,
        format!("m = {m}, recovery {freq:.3} >= 0.85; Pr[satisfiable within 11] = {p:.5} <= 0.25 + {radius:.4}"),
    ))
}

fn c10_reduction() -> Outcome {
    let suite = checks::reduction(0);
    let r = run("reduction", ScenarioConfig::new())?;
    Ok((suite.pass && r.pass, format!("{}; scenario pass = {}", suite.detail, r.pass)))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 dictators", 5, Box::new(c1_dictators)),
        ("2 disjoint conjunctions", 30, Box::new(c2_disjoint)),
        ("3 sample agreement", 60, Box::new(c3_agreement)),
        ("4 lower bound", 300, Box::new(c4_lower_bound)),
        ("5 robust learning", 120, Box::new(c5_robust_learn)),
        ("6 parity self-risk", 30, Box::new(|| from_check(checks::parity_self_risk(0)))),
        ("7 oracle equivalence", 600, Box::new(|| from_check(checks::oracle_equivalence(0)))),
        ("8 log-Lipschitz facts", 600, Box::new(|| from_check(checks::log_lipschitz(0)))),
        ("9 triangle inequality", 600, Box::new(|| from_check(checks::triangle(0)))),
        ("10 reduction", 60, Box::new(c10_reduction)),
        ("11 zero-risk propositions", 600, Box::new(|| from_check(checks::zero_risk(0)))),
    ];
    let mut failed = Vec::new();
    for (name, limit, f) in &criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {name}: {} ({detail}; {:.2} s, limit {limit} s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if !pass {
            failed.push(*name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
