//! Property suites run by `robustsim verify` and the acceptance tests. Each
//! check draws its random instances from one seed and reports a verdict with
//! a one-line summary.

use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use robustsim_core::adversary::Adversary;
use robustsim_core::concepts::{maj_decode, phi_encode};
use robustsim_core::distributions::Table;
use robustsim_core::hypercube::{ball_size, cube, enumerate_ball, hamming_distance, visit_ball, BallSpec};
use robustsim_core::learners::{exact_learn_membership, learn_monotone_conjunction};
use robustsim_core::reduction::{build_reduction_instance, last_bit_cheat};
use robustsim_core::risk::RiskKind;
use robustsim_core::seed::{derive_seed, stream_rng, SimRng};
use robustsim_core::{
    Classifier, Concept, Distribution, EvalMode, LabeledSample, MonotoneConjunction, Point, Result,
    RiskEngine,
};
use serde::Serialize;

use crate::gen::{random_concept, random_conjunction, random_distribution, random_sparse_table, random_subset};

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        CheckOutcome { name, pass, detail }
    }

    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => Self::new(name, pass, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

pub type CheckFn = fn(u64) -> CheckOutcome;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("hypercube", hypercube),
    ("parity-self-risk", parity_self_risk),
    ("oracle-equivalence", oracle_equivalence),
    ("log-lipschitz", log_lipschitz),
    ("triangle", triangle),
    ("reduction", reduction),
    ("zero-risk", zero_risk),
    ("learners", learners),
    ("worker-independence", worker_independence),
];

pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    CHECKS.iter().map(|(_, f)| f(seed)).collect()
}

fn rng_for(seed: u64, tag: u64) -> SimRng {
    stream_rng(derive_seed(seed, tag), 0)
}

/// Ball enumeration sizes and Hamming-metric axioms.
pub fn hypercube(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("hypercube", (|| {
        let mut rng = rng_for(seed, 10);
        for n in 1..=12 {
            let x = Point::random(n, &mut rng)?;
            for r in 0..=n.min(4) {
                let spec = BallSpec::new(x.clone(), r)?;
                let pts: Vec<Point> = enumerate_ball(&spec).collect();
                if ball_size(n, r)? != pts.len().into() {
                    return Ok((false, format!("ball count mismatch at n={n}, r={r}")));
                }
                if pts.iter().any(|z| hamming_distance(&x, z).map_or(true, |d| d > r)) {
                    return Ok((false, format!("point outside ball at n={n}, r={r}")));
                }
            }
        }
        let mut violations = 0;
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=16);
            let [a, b, c] = [(); 3].map(|_| Point::random(n, &mut rng).expect("valid"));
            let d = |p: &Point, q: &Point| hamming_distance(p, q).expect("same dim");
            if d(&a, &c) > d(&a, &b) + d(&b, &c) || d(&a, &b) != d(&b, &a) || d(&a, &a) != 0 {
                violations += 1;
            }
        }
        Ok((violations == 0, format!("ball counts n<=12 agree; {violations} metric violations in 10^4 triples")))
    })())
}

/// Parity is maximally non-robust to itself; every concept is robust to itself.
pub fn parity_self_risk(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("parity-self-risk", (|| {
        let engine = RiskEngine::default();
        let dist = Distribution::<f64>::uniform(8)?;
        let subsets: Vec<u32> = (1..256).collect();
        let parity_bad = subsets
            .par_iter()
            .map(|&mask| {
                let f = Concept::parity(8, (0..8).filter(|i| mask >> i & 1 == 1), false)?;
                Ok(engine.constant_in_ball_risk(&f, &f, &dist, 1, EvalMode::Exact)?.value != 1.0)
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        let self_bad = (0..100u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(derive_seed(seed, 11), i);
                let n = rng.gen_range(1..=10);
                let c = random_concept(n, &mut rng)?;
                let d = random_distribution(n, &mut rng)?;
                let rho = rng.gen_range(0..=n.min(3));
                Ok(engine.exact_in_ball_risk(&c, &c, &d, rho, EvalMode::Exact)?.value != 0.0)
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        Ok((
            parity_bad == 0 && self_bad == 0,
            format!(
                "R^C_1(f_I,f_I) = 1 for {}/255 nonempty I in [8]; R^E(c,c) = 0 for {}/100 random concepts",
                255 - parity_bad,
                100 - self_bad
            ),
        ))
    })())
}

fn attack_agrees(
    fast: &Adversary,
    slow: &Adversary,
    h: &dyn Classifier,
    c: &dyn Classifier,
    x: &Point,
    rho: usize,
) -> Result<bool> {
    let a = fast.exists_disagreement_in_ball(h, c, x, rho)?;
    let b = slow.exists_disagreement_in_ball(h, c, x, rho)?;
    let c_label = c.eval(x);
    let la = fast.exists_label_change_in_ball(h, c, x, rho)?;
    let lb = slow.exists_label_change_in_ball(h, c, x, rho)?;
    // closed forms report the distance even past rho; brute force stops at rho
    let capped = |d: Option<usize>| d.filter(|&d| d <= rho);
    let witness_ok = |w: &Option<Point>, pred: &dyn Fn(&Point) -> bool| match w {
        Some(w) => hamming_distance(x, w).is_ok_and(|d| d <= rho) && pred(w),
        None => true,
    };
    Ok(a.feasible == b.feasible
        && capped(a.min_flips) == capped(b.min_flips)
        && la.feasible == lb.feasible
        && capped(la.min_flips) == capped(lb.min_flips)
        && witness_ok(&a.witness, &|w| h.eval(w) != c.eval(w))
        && witness_ok(&la.witness, &|w| h.eval(w) != c_label))
}

/// Closed-form adversaries against brute-force ball enumeration.
pub fn oracle_equivalence(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("oracle-equivalence", (|| {
        let fast = Adversary::default();
        let slow = Adversary::brute_force();
        let random_bad = (0..10_000u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(derive_seed(seed, 12), i);
                let n = rng.gen_range(1..=14);
                let rho = rng.gen_range(0..=n.min(3));
                let h = random_conjunction(n, &mut rng)?;
                let c = if rng.gen_bool(0.5) { random_conjunction(n, &mut rng)? } else { random_concept(n, &mut rng)? };
                let x = Point::random(n, &mut rng)?;
                Ok(!attack_agrees(&fast, &slow, &h, &c, &x, rho)?)
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        // every pair of conjunctions for n <= 6, random pairs up to n = 12,
        // each against every point of the cube and every radius <= 3
        let mut pairs: Vec<(usize, Concept, Concept)> = Vec::new();
        for n in 1..=6usize {
            for a in 0..1u32 << n {
                for b in 0..1u32 << n {
                    let vars = |m: u32| (0..n).filter(move |i| m >> i & 1 == 1);
                    pairs.push((n, Concept::conjunction(n, vars(a))?, Concept::conjunction(n, vars(b))?));
                }
            }
        }
        let mut rng = rng_for(seed, 13);
        for n in 7..=12usize {
            for _ in 0..40 {
                pairs.push((n, random_conjunction(n, &mut rng)?, random_conjunction(n, &mut rng)?));
            }
        }
        let exhaustive_cases: usize = pairs.iter().map(|(n, ..)| (1usize << n) * (n.min(&3) + 1)).sum();
        let exhaustive_bad = pairs
            .par_iter()
            .map(|(n, h, c)| {
                let mut bad = 0usize;
                for x in cube(*n)? {
                    for rho in 0..=(*n).min(3) {
                        if !attack_agrees(&fast, &slow, h, c, &x, rho)? {
                            bad += 1;
                        }
                    }
                }
                Ok(bad)
            })
            .collect::<Result<Vec<usize>>>()?
            .into_iter()
            .sum::<usize>();
        Ok((
            random_bad == 0 && exhaustive_bad == 0,
            format!(
                "{random_bad} mismatches in 10^4 random instances (n<=14, rho<=3); \
                 {exhaustive_bad} in {exhaustive_cases} exhaustive cube cases (n<=12)"
            ),
        ))
    })())
}

/// Masses of every pattern in `{0,1,*}^n`, indexed in base 3 with digit
/// `j` for position `j` (2 = free).
pub fn pattern_masses(pmf_at: impl Fn(&Point) -> f64, n: usize) -> Vec<f64> {
    let size = 3usize.pow(n as u32);
    let pow3: Vec<usize> = (0..n).map(|j| 3usize.pow(j as u32)).collect();
    let mut out = vec![0.0; size];
    for idx in 0..size {
        let star = (0..n).find(|&j| idx / pow3[j] % 3 == 2);
        out[idx] = match star {
            // digit j replaced by 0 and by 1; both indices are smaller
            Some(j) => out[idx - 2 * pow3[j]] + out[idx - pow3[j]],
            None => {
                let ones: Vec<usize> = (0..n).filter(|&j| idx / pow3[j] % 3 == 1).collect();
                pmf_at(&Point::from_indices(n, &ones).expect("valid"))
            }
        };
    }
    out
}

/// Bit bounds, closure under marginals and conditionals, and pattern-mass
/// lower bounds for log-Lipschitz distributions.
pub fn log_lipschitz(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("log-lipschitz", (|| {
        let failures = (0..100u64)
            .into_par_iter()
            .map(|i| -> Result<Vec<String>> {
                let mut rng = stream_rng(derive_seed(seed, 14), i);
                let alpha = [1.0, 2.0, 3.0][i as usize % 3];
                let n = rng.gen_range(2..=10);
                let d = Distribution::Table(Table::<f64>::random_log_lipschitz(n, alpha, &mut rng)?);
                let mut bad = Vec::new();
                let tol = 1e-9;
                if !d.verify_log_lipschitz(alpha)?.holds() {
                    bad.push(format!("#{i}: generated table is not {alpha}-log-Lipschitz"));
                }
                let lo = 1.0 / (1.0 + alpha);
                let hi = alpha / (1.0 + alpha);
                for j in 0..n {
                    let p1 = d.bit_probability(j)?;
                    for p in [p1, 1.0 - p1] {
                        if p < lo * (1.0 - tol) || p > hi * (1.0 + tol) {
                            bad.push(format!("#{i}: Pr[x_{j}] = {p} outside [{lo}, {hi}]"));
                        }
                    }
                }
                let subsets: Vec<Vec<usize>> = if n <= 6 {
                    (1..(1u32 << n) - 1).map(|m| (0..n).filter(|j| m >> j & 1 == 1).collect()).collect()
                } else {
                    (0..24)
                        .map(|_| {
                            let mut idx: Vec<usize> = (0..n).collect();
                            idx.shuffle(&mut rng);
                            idx.truncate(rng.gen_range(1..n));
                            idx.sort_unstable();
                            idx
                        })
                        .collect()
                };
                for s in &subsets {
                    if !d.marginal(s)?.verify_log_lipschitz(alpha)?.holds() {
                        bad.push(format!("#{i}: marginal without {s:?} fails"));
                    }
                    let pattern = Point::random(s.len(), &mut rng)?;
                    let cond = d.conditional(s, |y| *y == pattern)?;
                    if !cond.verify_log_lipschitz(alpha)?.holds() {
                        bad.push(format!("#{i}: conditional on {s:?} = {pattern} fails"));
                    }
                }
                let table = d.to_table()?;
                let masses = pattern_masses(|x| table.mass_at_rank(x.rank().expect("fits") as usize), n);
                for (idx, &mass) in masses.iter().enumerate() {
                    let fixed = (0..n).filter(|&j| idx / 3usize.pow(j as u32) % 3 != 2).count();
                    let bound = lo.powi(fixed as i32);
                    if mass < bound * (1.0 - tol) {
                        bad.push(format!("#{i}: pattern {idx} has mass {mass} < {bound}"));
                    }
                }
                Ok(bad)
            })
            .collect::<Result<Vec<_>>>()?
            .concat();
        // product-form upper bound for products passing the check
        let mut rng = rng_for(seed, 15);
        let mut product_bad = 0;
        for _ in 0..100 {
            let alpha: f64 = rng.gen_range(1.0..4.0);
            let n = rng.gen_range(1..=10);
            let hi = alpha / (1.0 + alpha);
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0 - hi..=hi)).collect();
            let d = Distribution::<f64>::product(p.clone())?;
            if !d.verify_log_lipschitz(alpha)?.holds() {
                product_bad += 1;
                continue;
            }
            let s = random_subset(n, 0.5, &mut rng);
            let b = Point::random(n, &mut rng)?;
            let prod: f64 = s.iter().map(|&j| if b.get(j) { p[j] } else { 1.0 - p[j] }).product();
            if prod > hi.powi(s.len() as i32) * (1.0 + 1e-12) {
                product_bad += 1;
            }
        }
        let pass = failures.is_empty() && product_bad == 0;
        let mut detail = format!(
            "100 random tables (alpha in {{1,2,3}}, n<=10): {} failures; product upper bound: {product_bad} failures",
            failures.len()
        );
        if let Some(first) = failures.first() {
            detail.push_str(&format!("; first: {first}"));
        }
        Ok((pass, detail))
    })())
}

/// `R^E(c1,c2) <= R^E(c1,h) + R^E(c2,h)` on random triples.
pub fn triangle(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("triangle", (|| {
        let engine = RiskEngine::default();
        let bad = (0..1000u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(derive_seed(seed, 16), i);
                let n = rng.gen_range(2..=10);
                let d = random_distribution(n, &mut rng)?;
                let [c1, c2, h] = [(); 3].map(|_| random_concept(n, &mut rng).expect("valid n"));
                let curve = |a: &Concept, b: &Concept| {
                    engine.risk_curve(RiskKind::ExactInBall, a, b, &d, 2, EvalMode::Exact)
                };
                let (r12, r1h, r2h) = (curve(&c1, &c2)?, curve(&c1, &h)?, curve(&c2, &h)?);
                Ok((0..=2).filter(|&r| r12[r].value > r1h[r].value + r2h[r].value + 1e-12).count())
            })
            .collect::<Result<Vec<usize>>>()?
            .into_iter()
            .sum::<usize>();
        Ok((bad == 0, format!("{bad} violations over 10^3 random triples x rho in {{0,1,2}} (n<=10)")))
    })())
}

/// Encoding round trips, perturbation stability, risk transport and the
/// last-bit cheat.
pub fn reduction(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("reduction", (|| {
        let mut round_trip_bad = 0;
        for n in 1..=10 {
            for k in 0..=3 {
                for x in cube(n)? {
                    for b in [false, true] {
                        if maj_decode(&phi_encode(&x, b, k)?, k, n)? != x {
                            round_trip_bad += 1;
                        }
                    }
                }
            }
        }
        let mut stability_bad = 0;
        for x in cube(3)? {
            for b in [false, true] {
                let z = phi_encode(&x, b, 1)?;
                visit_ball::<()>(&z, 1, |w, _| {
                    if maj_decode(w, 1, 3).expect("dim") != x {
                        stability_bad += 1;
                    }
                    ControlFlow::Continue(())
                });
            }
        }
        let mut rng = rng_for(seed, 17);
        for _ in 0..10_000 {
            let x = Point::random(8, &mut rng)?;
            let z = phi_encode(&x, rng.gen_bool(0.5), 3)?;
            let flips: Vec<usize> = {
                let mut idx: Vec<usize> = (0..z.dim()).collect();
                idx.shuffle(&mut rng);
                idx.truncate(rng.gen_range(0..=3));
                idx
            };
            if maj_decode(&z.flip(&flips)?, 3, 8)? != x {
                stability_bad += 1;
            }
        }
        let engine = RiskEngine::default();
        let mut instances = Vec::new();
        for n in 1..=6usize {
            for k in 0..=2usize {
                for rep in 0..4u64 {
                    instances.push((n, k, rep));
                }
            }
        }
        let results = instances
            .par_iter()
            .map(|&(n, k, rep)| -> Result<(bool, Option<bool>)> {
                let mut rng = stream_rng(derive_seed(seed, 18), (n * 100 + k * 10) as u64 + rep);
                let c = random_concept(n, &mut rng)?;
                let h = random_concept(n, &mut rng)?;
                let d = if rng.gen_bool(0.3) { random_sparse_table(n, &mut rng)? } else { random_distribution(n, &mut rng)? };
                let inst = build_reduction_instance(c.clone(), d.clone(), k)?;
                let h_enc = Concept::majority_encoded(h.clone(), k)?;
                let robust = engine
                    .exact_in_ball_risk(&h_enc, &inst.encoded_concept, &inst.induced_distribution, k, EvalMode::Exact)?
                    .value;
                let standard = engine.disagreement_risk(&h, &c, &d, EvalMode::Exact)?.value;
                let transport = (robust - standard).abs() <= 1e-12;
                let support = d.support()?;
                let non_constant = support.iter().any(|(x, _)| c.eval(x)) && support.iter().any(|(x, _)| !c.eval(x));
                let cheat_ok = if non_constant {
                    let cheat = last_bit_cheat(inst.encoded_dim())?;
                    let d2 = &inst.induced_distribution;
                    let std = engine.disagreement_risk(&cheat, &inst.encoded_concept, d2, EvalMode::Exact)?.value;
                    let rc = engine.constant_in_ball_risk(&cheat, &inst.encoded_concept, d2, 1, EvalMode::Exact)?.value;
                    Some(std == 0.0 && (rc - 1.0).abs() <= 1e-12)
                } else {
                    None
                };
                Ok((transport, cheat_ok))
            })
            .collect::<Result<Vec<_>>>()?;
        let transport_bad = results.iter().filter(|r| !r.0).count();
        let cheat_cases = results.iter().filter(|r| r.1.is_some()).count();
        let cheat_bad = results.iter().filter(|r| r.1 == Some(false)).count();
        Ok((
            round_trip_bad == 0 && stability_bad == 0 && transport_bad == 0 && cheat_bad == 0 && cheat_cases > 0,
            format!(
                "round trip (n<=10, k<=3): {round_trip_bad} failures; stability (exhaustive n=3,k=1 + 10^4 random n=8,k=3): \
                 {stability_bad}; transport ({} instances, n<=6, k<=2): {transport_bad}; cheat ({cheat_cases} instances): {cheat_bad}",
                results.len()
            ),
        ))
    })())
}

/// Small robust risk forces agreement on the support, for both risks.
pub fn zero_risk(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("zero-risk", (|| {
        let engine = RiskEngine::default();
        let results = (0..1000u64)
            .into_par_iter()
            .map(|i| -> Result<[bool; 4]> {
                let mut rng = stream_rng(derive_seed(seed, 19), i);
                let n = rng.gen_range(1..=10);
                let d = if rng.gen_bool(0.5) { random_sparse_table(n, &mut rng)? } else { random_distribution(n, &mut rng)? };
                let c = random_concept(n, &mut rng)?;
                let h = if rng.gen_bool(0.3) { c.clone() } else { random_concept(n, &mut rng)? };
                let rho = rng.gen_range(0..=n.min(2));
                let exact_ok = engine.robust_to_zero_risk_check(&h, &c, &d, rho)?;
                let const_ok = engine.constant_to_zero_risk_check(&h, &c, &d, rho)?;
                // whether the premise fired, for reporting
                let support = d.support()?;
                let agree = support.iter().all(|(x, _)| h.eval(x) == c.eval(x));
                let re = engine.exact_in_ball_risk(&h, &c, &d, rho, EvalMode::Exact)?.value;
                Ok([exact_ok, const_ok, agree, re == 0.0])
            })
            .collect::<Result<Vec<_>>>()?;
        let exact_bad = results.iter().filter(|r| !r[0]).count();
        let const_bad = results.iter().filter(|r| !r[1]).count();
        let agreeing = results.iter().filter(|r| r[2]).count();
        Ok((
            exact_bad == 0 && const_bad == 0,
            format!(
                "1000 random instances (n<=10): {exact_bad} exact-in-ball and {const_bad} constant-in-ball \
                 counterexamples; h = c on support in {agreeing}"
            ),
        ))
    })())
}

/// Elimination and membership-query learners.
pub fn learners(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("learners", (|| {
        let mut rng = rng_for(seed, 20);
        let mut bad = 0;
        for _ in 0..300 {
            let n = rng.gen_range(1..=24);
            let target = MonotoneConjunction::new(n, random_subset(n, 0.2, &mut rng))?;
            let p = rng.gen_range(0.5..0.95);
            let d = Distribution::<f64>::product(vec![p; n])?;
            let mut pts: Vec<Point> = (0..rng.gen_range(0..60)).map(|_| d.sample(&mut rng)).collect();
            let tc = target.clone().into_concept();
            let h = learn_monotone_conjunction(&LabeledSample::labeled_by(&tc, pts.clone())?);
            let consistent = pts.iter().all(|x| h.eval(x) == target.eval(x));
            let maximal = target.vars().iter().all(|&i| h.contains(i));
            pts.shuffle(&mut rng);
            let h2 = learn_monotone_conjunction(&LabeledSample::labeled_by(&tc, pts)?);
            let (hm, q) = exact_learn_membership(|x| target.eval(x), n)?;
            if !consistent || !maximal || h2 != h || hm != target || q != n + 1 {
                bad += 1;
            }
        }
        Ok((bad == 0, format!("{bad} failures over 300 random targets (consistency, maximality, order, membership)")))
    })())
}

/// Monte Carlo risk is identical under different thread counts.
pub fn worker_independence(seed: u64) -> CheckOutcome {
    CheckOutcome::from_result("worker-independence", (|| {
        let h = Concept::conjunction(32, 0..8)?;
        let c = Concept::conjunction(32, 8..16)?;
        let d = Distribution::<f64>::uniform(32)?;
        let mode = EvalMode::MonteCarlo { samples: 50_000, seed };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("pool")
                .install(|| RiskEngine::default().risk_curve(RiskKind::ExactInBall, &h, &c, &d, 4, mode))
        };
        let (a, b) = (run(1)?, run(5)?);
        Ok((a == b, format!("risk curves with 1 and 5 workers identical: {}", a == b)))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_masses_match_direct_sums() {
        let mut rng = rng_for(1, 1);
        let n = 4;
        let t = Table::<f64>::random_log_lipschitz(n, 2.0, &mut rng).unwrap();
        let masses = pattern_masses(|x| t.mass_at_rank(x.rank().unwrap() as usize), n);
        assert!((masses[masses.len() - 1] - 1.0).abs() < 1e-12);
        // pattern: position 0 fixed to 1, position 2 fixed to 0, others free
        let idx: usize = [1, 2, 0, 2].iter().rev().fold(0, |acc, d| acc * 3 + d);
        let direct: f64 = cube(n)
            .unwrap()
            .filter(|x| x.get(0) && !x.get(2))
            .map(|x| t.mass_at_rank(x.rank().unwrap() as usize))
            .sum();
        assert!((masses[idx] - direct).abs() < 1e-12);
    }
}
