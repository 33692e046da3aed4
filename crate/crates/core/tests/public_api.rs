//! Exercises the crate-root API against oracles written out here by hand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustsim_core::hypercube::cube;
use robustsim_core::learners::{claim1_sample_size, lemma5_max_sample_size, pac_sample_size_finite_class};
use robustsim_core::{
    ball_size, Classifier, Concept, Distribution, Distribution32, Distribution64, EvalMode, LearnParams, Point,
    RiskEngine, RiskKind,
};

fn bits(x: &Point) -> Vec<bool> {
    (0..x.dim()).map(|i| x.get(i)).collect()
}

fn dist(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(p, q)| p != q).count()
}

/// Both robust risks by scanning every pair of cube points.
fn quadratic_risks(h: &Concept, c: &Concept, d: &Distribution64, rho: usize) -> (f64, f64) {
    let pts: Vec<Point> = cube(h.dim()).unwrap().collect();
    let raw: Vec<Vec<bool>> = pts.iter().map(bits).collect();
    let (mut re, mut rc) = (0.0, 0.0);
    for (x, bx) in pts.iter().zip(&raw) {
        let near = || pts.iter().zip(&raw).filter(|(_, bz)| dist(bx, bz) <= rho).map(|(z, _)| z);
        let mass = d.pmf(x).unwrap();
        if near().any(|z| h.eval(z) != c.eval(z)) {
            re += mass;
        }
        if near().any(|z| h.eval(z) != c.eval(x)) {
            rc += mass;
        }
    }
    (re, rc)
}

fn random_concept(n: usize, rng: &mut impl Rng) -> Concept {
    let vars: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    match rng.gen_range(0..3) {
        0 => Concept::conjunction(n, vars).unwrap(),
        1 => Concept::parity(n, vars, rng.gen()).unwrap(),
        _ => Concept::dictator(n, rng.gen_range(0..n)).unwrap(),
    }
}

#[test]
fn ball_sizes_are_binomial_sums() {
    for n in 0..=40usize {
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for j in 1..row.len() {
                next[j] = row[j - 1] + row[j];
            }
            row = next;
        }
        for rho in 0..=n {
            let expected: u128 = row[..=rho].iter().sum();
            assert_eq!(ball_size(n, rho).unwrap().to_string(), expected.to_string(), "n={n} rho={rho}");
        }
    }
}

#[test]
fn exact_risks_match_pairwise_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let engine = RiskEngine::default();
    for _ in 0..60 {
        let n = rng.gen_range(1..=7);
        let h = random_concept(n, &mut rng);
        let c = random_concept(n, &mut rng);
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..0.8)).collect();
        let d = Distribution::product(p).unwrap();
        for rho in 0..=n.min(3) {
            let (re, rc) = quadratic_risks(&h, &c, &d, rho);
            let got_e = engine.exact_in_ball_risk(&h, &c, &d, rho, EvalMode::Exact).unwrap().value;
            let got_c = engine.constant_in_ball_risk(&h, &c, &d, rho, EvalMode::Exact).unwrap().value;
            assert!((got_e - re).abs() < 1e-12, "R^E {h} vs {c} rho={rho}: {got_e} != {re}");
            assert!((got_c - rc).abs() < 1e-12, "R^C {h} vs {c} rho={rho}: {got_c} != {rc}");
        }
    }
}

#[test]
fn curve_entries_equal_single_queries() {
    let h = Concept::conjunction(9, [0, 1, 2]).unwrap();
    let c = Concept::conjunction(9, [3, 4]).unwrap();
    let d = Distribution64::uniform(9).unwrap();
    let engine = RiskEngine::default();
    for kind in [RiskKind::ExactInBall, RiskKind::ConstantInBall] {
        let curve = engine.risk_curve(kind, &h, &c, &d, 5, EvalMode::Exact).unwrap();
        for (rho, point) in curve.iter().enumerate() {
            let single = engine.robust_risk(kind, &h, &c, &d, rho, EvalMode::Exact).unwrap();
            assert_eq!(point.value, single.value);
        }
    }
}

#[test]
fn monte_carlo_lands_near_exact() {
    let h = Concept::conjunction(12, [0, 1, 2, 3]).unwrap();
    let c = Concept::conjunction(12, [4, 5, 6, 7]).unwrap();
    let d = Distribution64::uniform(12).unwrap();
    let engine = RiskEngine::default();
    let exact = engine.exact_in_ball_risk(&h, &c, &d, 2, EvalMode::Exact).unwrap();
    let mc = engine
        .exact_in_ball_risk(&h, &c, &d, 2, EvalMode::MonteCarlo { samples: 50_000, seed: 5 })
        .unwrap();
    assert!((mc.value - exact.value).abs() <= mc.confidence_radius);
    assert_eq!(mc.samples_used, 50_000);
}

#[test]
fn single_precision_tracks_double() {
    let h = Concept::parity(6, [0, 3, 5], false).unwrap();
    let c = Concept::conjunction(6, [1, 2]).unwrap();
    let p = [0.3, 0.45, 0.5, 0.6, 0.7, 0.55];
    let d64 = Distribution64::product(p.to_vec()).unwrap();
    let d32 = Distribution32::product(p.iter().map(|&v| v as f32).collect()).unwrap();
    let engine = RiskEngine::default();
    for rho in 0..=3 {
        let a = engine.exact_in_ball_risk(&h, &c, &d64, rho, EvalMode::Exact).unwrap().value;
        let b = engine.exact_in_ball_risk(&h, &c, &d32, rho, EvalMode::Exact).unwrap().value;
        assert!((a - b as f64).abs() < 1e-5, "rho={rho}: {a} vs {b}");
    }
}

#[test]
fn sample_sizes_against_hand_formulas() {
    // ceil((ln n - ln delta) / eta^(l+1))
    let hand = ((16f64.ln() - 0.1f64.ln()) / 0.5f64.powi(4)).ceil() as u64;
    assert_eq!(hand, 82);
    assert_eq!(claim1_sample_size(16, 0.1, 0.5, 3).unwrap().as_u64(), Some(hand));

    // largest m with (1 - 2^-l)^(2m) >= 1/2
    let l = 16;
    let q = 1.0 - 2f64.powi(-l);
    let m = lemma5_max_sample_size(l as u32).unwrap();
    assert!(q.powf(2.0 * m as f64) >= 0.5);
    assert!(q.powf(2.0 * (m + 1) as f64) < 0.5);
    assert_eq!(m, 22712);

    // ceil((ln |H| + ln(1/delta)) / eps)
    let class = num_bigint::BigUint::from(1u32) << 16;
    let hand = ((16.0 * 2f64.ln() + 20f64.ln()) / 0.1).ceil() as u64;
    assert_eq!(pac_sample_size_finite_class(&class, 0.1, 0.05).unwrap(), hand);

    assert!(LearnParams::new(0.6, 0.1, 16, 1.0).is_err());
    assert!(LearnParams::new(0.1, 0.1, 16, 0.5).is_err());
}

#[test]
fn dimension_mismatch_is_an_error() {
    let h = Concept::conjunction(5, [0]).unwrap();
    let c = Concept::conjunction(6, [0]).unwrap();
    let d = Distribution64::uniform(6).unwrap();
    assert!(RiskEngine::default().exact_in_ball_risk(&h, &c, &d, 1, EvalMode::Exact).is_err());
    assert!(RiskEngine::default().exact_in_ball_risk(&c, &c, &d, 7, EvalMode::Exact).is_err());
}
