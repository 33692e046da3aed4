//! Exact and Monte Carlo evaluation of the two robust risks.
//!
//! * exact-in-the-ball: `Pr_x[∃z ∈ B_ρ(x): h(z) ≠ c(z)]`
//! * constant-in-the-ball: `Pr_x[∃z ∈ B_ρ(x): h(z) ≠ c(x)]`
//!
//! Each point costs one adversary query that returns the minimum number of
//! flips, so a whole curve over `ρ = 0..=ρ_max` costs the same as one radius.
//! Monte Carlo work is split into fixed-size chunks; chunk `j` draws from
//! stream `j` of the seed, so values do not depend on the thread count.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::Adversary;
use crate::concepts::Classifier;
use crate::distributions::Distribution;
use crate::error::{check_dim, Error, Result};
use crate::hypercube::{ball_size, visit_ball, Point};
use crate::scalar::Probability;
use crate::seed::stream_rng;

/// Samples per Monte Carlo chunk.
pub const MC_CHUNK: u64 = 4096;

/// Default two-sided confidence level for Hoeffding radii.
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskKind {
    ExactInBall,
    ConstantInBall,
}

impl std::str::FromStr for RiskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-in-ball" | "exact_in_ball" => Ok(RiskKind::ExactInBall),
            "constant-in-ball" | "constant_in_ball" => Ok(RiskKind::ConstantInBall),
            other => Err(Error::Parse(format!("unknown risk kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// A risk value with provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiskEstimate<P: Probability = f64> {
    pub kind: RiskKind,
    pub rho: usize,
    pub value: P,
    pub method: Method,
    pub samples_used: u64,
    /// Two-sided Hoeffding radius; zero for exact values.
    pub confidence_radius: P,
    pub seed: Option<u64>,
}

/// Two-sided Hoeffding radius `sqrt(ln(2/γ) / 2m)` at confidence `1 - γ`.
pub fn hoeffding_radius(samples: u64, confidence: f64) -> f64 {
    if samples == 0 {
        return f64::INFINITY;
    }
    let gamma = 1.0 - confidence;
    ((2.0 / gamma).ln() / (2.0 * samples as f64)).sqrt()
}

/// Risk evaluator: adversary budget plus confidence level.
#[derive(Clone, Copy, Debug)]
pub struct RiskEngine {
    pub adversary: Adversary,
    pub confidence: f64,
}

impl Default for RiskEngine {
    fn default() -> Self {
        RiskEngine {
            adversary: Adversary::default(),
            confidence: DEFAULT_CONFIDENCE,
        }
    }
}

fn clamp01<P: Probability>(v: P) -> P {
    v.max(P::zero()).min(P::one())
}

impl RiskEngine {
    pub fn with_adversary(adversary: Adversary) -> Self {
        RiskEngine {
            adversary,
            ..Self::default()
        }
    }

    /// Minimum flips (at most `max_rho`) for the risk predicate at `x`.
    pub fn point_min_flips(
        &self,
        kind: RiskKind,
        h: &dyn Classifier,
        c: &dyn Classifier,
        x: &Point,
        max_rho: usize,
    ) -> Result<Option<usize>> {
        match kind {
            RiskKind::ExactInBall => self.adversary.min_flips_disagreement(h, c, x, max_rho),
            RiskKind::ConstantInBall => self.adversary.min_flips_label_change(h, c, x, max_rho),
        }
    }

    /// Risks at every radius `0..=rho_max`.
    pub fn risk_curve<P: Probability>(
        &self,
        kind: RiskKind,
        h: &dyn Classifier,
        c: &dyn Classifier,
        dist: &Distribution<P>,
        rho_max: usize,
        mode: EvalMode,
    ) -> Result<Vec<RiskEstimate<P>>> {
        check_dim(h.dim(), c.dim())?;
        check_dim(h.dim(), dist.dim())?;
        if rho_max > dist.dim() {
            return Err(Error::RadiusTooLarge {
                radius: rho_max,
                dim: dist.dim(),
            });
        }
        match mode {
            EvalMode::Exact => {
                if !dist.is_enumerable() {
                    return Err(Error::NotEnumerable(format!(
                        "exact mode needs an enumerable distribution (dim {})",
                        dist.dim()
                    )));
                }
                let support = dist.support()?;
                let flips = support
                    .par_iter()
                    .map(|(x, _)| self.point_min_flips(kind, h, c, x, rho_max))
                    .collect::<Result<Vec<_>>>()?;
                let mut by_radius = vec![P::zero(); rho_max + 1];
                for ((_, mass), d) in support.iter().zip(&flips) {
                    if let Some(d) = d {
                        by_radius[*d] = by_radius[*d] + *mass;
                    }
                }
                let mut acc = P::zero();
                Ok(by_radius
                    .into_iter()
                    .enumerate()
                    .map(|(rho, m)| {
                        acc = acc + m;
                        RiskEstimate {
                            kind,
                            rho,
                            value: clamp01(acc),
                            method: Method::Exact,
                            samples_used: 0,
                            confidence_radius: P::zero(),
                            seed: None,
                        }
                    })
                    .collect())
            }
            EvalMode::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::InvalidParameter("Monte Carlo needs samples > 0".into()));
                }
                let chunks = samples.div_ceil(MC_CHUNK);
                let hists = (0..chunks)
                    .into_par_iter()
                    .map(|j| {
                        let mut rng = stream_rng(seed, j);
                        let len = MC_CHUNK.min(samples - j * MC_CHUNK);
                        let mut hist = vec![0u64; rho_max + 1];
                        for _ in 0..len {
                            let x = dist.sample(&mut rng);
                            if let Some(d) = self.point_min_flips(kind, h, c, &x, rho_max)? {
                                hist[d] += 1;
                            }
                        }
                        Ok(hist)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut cum = 0u64;
                let radius = P::of(hoeffding_radius(samples, self.confidence));
                Ok((0..=rho_max)
                    .map(|rho| {
                        cum += hists.iter().map(|h| h[rho]).sum::<u64>();
                        RiskEstimate {
                            kind,
                            rho,
                            value: P::of(cum as f64 / samples as f64),
                            method: Method::MonteCarlo,
                            samples_used: samples,
                            confidence_radius: radius,
                            seed: Some(seed),
                        }
                    })
                    .collect())
            }
        }
    }

    pub fn robust_risk<P: Probability>(
        &self,
        kind: RiskKind,
        h: &dyn Classifier,
        c: &dyn Classifier,
        dist: &Distribution<P>,
        rho: usize,
        mode: EvalMode,
    ) -> Result<RiskEstimate<P>> {
        let curve = self.risk_curve(kind, h, c, dist, rho, mode)?;
        Ok(*curve.last().expect("curve covers 0..=rho"))
    }

    pub fn exact_in_ball_risk<P: Probability>(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        dist: &Distribution<P>,
        rho: usize,
        mode: EvalMode,
    ) -> Result<RiskEstimate<P>> {
        self.robust_risk(RiskKind::ExactInBall, h, c, dist, rho, mode)
    }

    pub fn constant_in_ball_risk<P: Probability>(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        dist: &Distribution<P>,
        rho: usize,
        mode: EvalMode,
    ) -> Result<RiskEstimate<P>> {
        self.robust_risk(RiskKind::ConstantInBall, h, c, dist, rho, mode)
    }

    /// Standard risk `Pr_x[h(x) ≠ c(x)]`.
    pub fn disagreement_risk<P: Probability>(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        dist: &Distribution<P>,
        mode: EvalMode,
    ) -> Result<RiskEstimate<P>> {
        self.exact_in_ball_risk(h, c, dist, 0, mode)
    }

    /// `μ(B_ρ(x))` for every `x` whose ball has positive mass.
    pub fn ball_masses<P: Probability>(
        &self,
        dist: &Distribution<P>,
        rho: usize,
    ) -> Result<HashMap<Point, P>> {
        if !dist.is_enumerable() {
            return Err(Error::NotEnumerable(format!("dimension {}", dist.dim())));
        }
        let support = dist.support()?;
        let visits = ball_size(dist.dim(), rho)? * BigUint::from(support.len());
        if visits > BigUint::from(self.adversary.enumeration_limit) {
            return Err(Error::Intractable {
                points: visits.to_string(),
                limit: self.adversary.enumeration_limit,
            });
        }
        let mut masses: HashMap<Point, P> = HashMap::new();
        for (s, m) in &support {
            visit_ball::<()>(s, rho, |z, _| {
                let e = masses.entry(z.clone()).or_insert_with(P::zero);
                *e = *e + *m;
                ControlFlow::Continue(())
            });
        }
        Ok(masses)
    }

    /// `min { μ(B_ρ(x)) : μ(B_ρ(x)) > 0 }`.
    pub fn min_ball_mass<P: Probability>(&self, dist: &Distribution<P>, rho: usize) -> Result<P> {
        Ok(self
            .ball_masses(dist, rho)?
            .into_values()
            .fold(P::infinity(), P::min))
    }

    /// Checks on one instance that an exact-in-the-ball risk below the
    /// minimum ball mass forces `h = c` wherever `μ(B_ρ(x)) > 0`.
    pub fn robust_to_zero_risk_check<P: Probability>(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        dist: &Distribution<P>,
        rho: usize,
    ) -> Result<bool> {
        let masses = self.ball_masses(dist, rho)?;
        let eps = masses.values().copied().fold(P::infinity(), P::min);
        let risk = self.exact_in_ball_risk(h, c, dist, rho, EvalMode::Exact)?.value;
        if risk < eps * (P::one() - P::ratio_tolerance()) {
            Ok(masses.keys().all(|x| h.eval(x) == c.eval(x)))
        } else {
            Ok(true)
        }
    }

    /// Constant-in-the-ball analogue: a risk below the smallest atom forces
    /// `h = c` on the support.
    pub fn constant_to_zero_risk_check<P: Probability>(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        dist: &Distribution<P>,
        rho: usize,
    ) -> Result<bool> {
        let support = dist.support()?;
        let eps = support.iter().map(|s| s.1).fold(P::infinity(), P::min);
        let risk = self.constant_in_ball_risk(h, c, dist, rho, EvalMode::Exact)?.value;
        if risk < eps * (P::one() - P::ratio_tolerance()) {
            Ok(support.iter().all(|(x, _)| h.eval(x) == c.eval(x)))
        } else {
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::Concept;
    use crate::distributions::{Coupled, Table};
    use crate::hypercube::cube;
    use crate::seed::rng_from_seed;
    fn engine() -> RiskEngine {
        RiskEngine::default()
    }

    /// Independent oracle: definition of the risks by full double loop.
    fn risk_by_definition(
        kind: RiskKind,
        h: &Concept,
        c: &Concept,
        d: &Distribution<f64>,
        rho: usize,
    ) -> f64 {
        let n = d.dim();
        cube(n)
            .unwrap()
            .filter(|x| {
                cube(n).unwrap().any(|z| {
                    crate::hypercube::hamming_distance(x, &z).unwrap() <= rho
                        && match kind {
                            RiskKind::ExactInBall => h.eval(&z) != c.eval(&z),
                            RiskKind::ConstantInBall => h.eval(&z) != c.eval(x),
                        }
                })
            })
            .map(|x| d.pmf(&x).unwrap())
            .sum()
    }

    #[test]
    fn self_risk_is_zero() {
        let d = Distribution::<f64>::uniform(5).unwrap();
        let c = Concept::parity(5, [0, 3], false).unwrap();
        let r = engine().exact_in_ball_risk(&c, &c, &d, 3, EvalMode::Exact).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.confidence_radius, 0.0);
    }

    #[test]
    fn dictator_pair_under_coupling_has_risk_one() {
        let d = Distribution::<f64>::Coupled(Coupled::fair_pair(3, 0, 1).unwrap());
        let c1 = Concept::dictator(3, 0).unwrap();
        let c2 = Concept::dictator(3, 1).unwrap();
        let r = engine().exact_in_ball_risk(&c1, &c2, &d, 1, EvalMode::Exact).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let s = engine().disagreement_risk(&c1, &c2, &d, EvalMode::Exact).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn dictators_standard_risk_is_half() {
        let d = Distribution::<f64>::uniform(2).unwrap();
        let c1 = Concept::dictator(2, 0).unwrap();
        let c2 = Concept::dictator(2, 1).unwrap();
        assert_eq!(engine().disagreement_risk(&c1, &c2, &d, EvalMode::Exact).unwrap().value, 0.5);
    }

    #[test]
    fn parity_constant_in_ball_self_risk_is_one() {
        let d = Distribution::<f64>::product(vec![0.3, 0.6, 0.8, 0.5]).unwrap();
        let f = Concept::parity(4, [1, 2], true).unwrap();
        let r = engine().constant_in_ball_risk(&f, &f, &d, 1, EvalMode::Exact).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let z = Concept::constant(4, false).unwrap();
        assert_eq!(engine().constant_in_ball_risk(&z, &z, &d, 4, EvalMode::Exact).unwrap().value, 0.0);
    }

    #[test]
    fn curves_match_definition() {
        let mut rng = rng_from_seed(1);
        let d = Distribution::Table(Table::random_log_lipschitz(6, 2.0, &mut rng).unwrap());
        let pairs = [
            (Concept::conjunction(6, [0, 1]).unwrap(), Concept::conjunction(6, [2, 3, 4]).unwrap()),
            (Concept::parity(6, [0, 5], false).unwrap(), Concept::dictator(6, 2).unwrap()),
            (Concept::constant(6, false).unwrap(), Concept::conjunction(6, [1]).unwrap()),
        ];
        for (h, c) in &pairs {
            for kind in [RiskKind::ExactInBall, RiskKind::ConstantInBall] {
                let curve = engine().risk_curve(kind, h, c, &d, 3, EvalMode::Exact).unwrap();
                for r in &curve {
                    let expect = risk_by_definition(kind, h, c, &d, r.rho);
                    assert!((r.value - expect).abs() < 1e-12, "{kind:?} {h} {c} rho={}", r.rho);
                }
                assert!(curve.windows(2).all(|w| w[0].value <= w[1].value));
            }
            let e0 = engine().exact_in_ball_risk(h, c, &d, 0, EvalMode::Exact).unwrap().value;
            let c0 = engine().constant_in_ball_risk(h, c, &d, 0, EvalMode::Exact).unwrap().value;
            assert!((e0 - c0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_zero_but_exact_positive_instance() {
        // small search over point-mass tables, constant h and dictator c
        let mut found = None;
        for atom in 0..4u64 {
            let mut w = vec![0.0; 4];
            w[atom as usize] = 1.0;
            let d = Distribution::Table(Table::new(2, w).unwrap());
            for value in [false, true] {
                let h = Concept::constant(2, value).unwrap();
                let c = Concept::dictator(2, 0).unwrap();
                let rc = engine().constant_in_ball_risk(&h, &c, &d, 1, EvalMode::Exact).unwrap().value;
                let re = engine().exact_in_ball_risk(&h, &c, &d, 1, EvalMode::Exact).unwrap().value;
                if rc == 0.0 && re > 0.0 && found.is_none() {
                    found = Some((atom, value, re));
                }
            }
        }
        // point mass on 00, h = const 0, c = dict:0: flipping bit 0 exposes c
        assert_eq!(found, Some((0, false, 1.0)));
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let d = Distribution::<f64>::uniform(12).unwrap();
        let h = Concept::conjunction(12, [0, 1, 2]).unwrap();
        let c = Concept::conjunction(12, [3, 4, 5]).unwrap();
        let mode = EvalMode::MonteCarlo { samples: 20_000, seed: 9 };
        let a = engine().exact_in_ball_risk(&h, &c, &d, 2, mode).unwrap();
        let b = engine().exact_in_ball_risk(&h, &c, &d, 2, mode).unwrap();
        assert_eq!(a, b);
        let exact = engine().exact_in_ball_risk(&h, &c, &d, 2, EvalMode::Exact).unwrap();
        assert!((a.value - exact.value).abs() <= a.confidence_radius);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c1 = single.install(|| engine().exact_in_ball_risk(&h, &c, &d, 2, mode).unwrap());
        assert_eq!(c1, a);
    }

    #[test]
    fn min_ball_mass_examples() {
        let d = Distribution::<f64>::uniform(6).unwrap();
        let e = engine().min_ball_mass(&d, 2).unwrap();
        assert!((e - 22.0 / 64.0).abs() < 1e-15);
        let mut w = vec![0.0; 8];
        w[5] = 1.0;
        let atom = Distribution::Table(Table::new(3, w).unwrap());
        assert_eq!(engine().min_ball_mass(&atom, 0).unwrap(), 1.0);
        let prod = Distribution::<f64>::product(vec![0.2, 0.7, 0.9]).unwrap();
        assert!((engine().min_ball_mass(&prod, 3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_risk_propositions_hold_on_identical_pairs() {
        let d = Distribution::<f64>::uniform(4).unwrap();
        let c = Concept::conjunction(4, [1, 2]).unwrap();
        assert!(engine().robust_to_zero_risk_check(&c, &c, &d, 1).unwrap());
        assert!(engine().constant_to_zero_risk_check(&c, &c, &d, 1).unwrap());
    }

    #[test]
    fn exact_mode_needs_enumerable_distribution() {
        let d = Distribution::<f64>::uniform(30).unwrap();
        let c = Concept::conjunction(30, [1]).unwrap();
        assert!(matches!(
            engine().exact_in_ball_risk(&c, &c, &d, 1, EvalMode::Exact),
            Err(Error::NotEnumerable(_))
        ));
    }

    #[test]
    fn hoeffding_radius_value() {
        let r = hoeffding_radius(10_000, 0.99);
        assert!((r - (200f64.ln() / 20_000.0).sqrt()).abs() < 1e-15);
    }
}
