//! Encoding a concept/distribution pair into a higher-dimensional one whose
//! labels are embedded in the input, and moving learners across it.

use std::collections::HashMap;

use crate::concepts::{encoded_dim, maj_decode, phi_encode, Classifier, Concept};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::hypercube::Point;
use crate::learners::{LabeledSample, Learner};
use crate::scalar::Probability;

/// A base pair `(c, D)` together with its encoded pair `(c ∘ maj, D′)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionInstance<P: Probability = f64> {
    pub base_concept: Concept,
    pub base_distribution: Distribution<P>,
    pub k: usize,
    pub encoded_concept: Concept,
    pub induced_distribution: Distribution<P>,
}

impl<P: Probability> ReductionInstance<P> {
    pub fn n(&self) -> usize {
        self.base_concept.dim()
    }

    pub fn encoded_dim(&self) -> usize {
        encoded_dim(self.n(), self.k)
    }

    /// `φ_k(x, c(x))`.
    pub fn encode(&self, x: &Point) -> Result<Point> {
        phi_encode(x, self.base_concept.evaluate(x)?, self.k)
    }
}

pub fn build_reduction_instance<P: Probability>(
    c: Concept,
    dist: Distribution<P>,
    k: usize,
) -> Result<ReductionInstance<P>> {
    let encoded_concept = Concept::majority_encoded(c.clone(), k)?;
    let induced_distribution = Distribution::induced(dist.clone(), c.clone(), k)?;
    Ok(ReductionInstance {
        base_concept: c,
        base_distribution: dist,
        k,
        encoded_concept,
        induced_distribution,
    })
}

/// `x ↦ h′(φ_k(x, 0))`: a hypothesis over the encoded space pulled back to
/// the base space with the label bit fixed to 0.
#[derive(Clone, Debug)]
pub struct PhiComposed<H> {
    inner: H,
    n: usize,
    k: usize,
}

impl<H: Classifier> PhiComposed<H> {
    pub fn new(inner: H, n: usize, k: usize) -> Result<Self> {
        crate::error::check_dim(encoded_dim(n, k), inner.dim())?;
        Ok(PhiComposed { inner, n, k })
    }

    pub fn inner(&self) -> &H {
        &self.inner
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// With `k = 0` nothing protects the label bit, so `h′` may read it
    /// directly and the fixed choice matters.
    pub fn label_bit_exposed(&self) -> bool {
        self.k == 0
    }

    /// Points among `xs` where `h′` answers differently for the two label bits.
    pub fn label_bit_sensitivity<'a>(&self, xs: impl IntoIterator<Item = &'a Point>) -> usize {
        xs.into_iter()
            .filter(|x| {
                let z0 = phi_encode(x, false, self.k).expect("dimension validated");
                let z1 = phi_encode(x, true, self.k).expect("dimension validated");
                self.inner.eval(&z0) != self.inner.eval(&z1)
            })
            .count()
    }
}

impl<H: Classifier> Classifier for PhiComposed<H> {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &Point) -> bool {
        let z = phi_encode(x, false, self.k).expect("dimension validated");
        self.inner.eval(&z)
    }
}

/// Encodes `sample` as `{φ_k(x, y)}` with labels `y`, trains `robust_learner`
/// on it and pulls the result back to the base space.
pub fn pac_from_robust<L: Learner>(
    robust_learner: &L,
    sample: &LabeledSample,
    k: usize,
) -> Result<PhiComposed<L::Hypothesis>> {
    let n = sample.dim();
    let points = sample
        .iter()
        .map(|(x, y)| phi_encode(x, y, k))
        .collect::<Result<Vec<_>>>()?;
    let encoded = LabeledSample::new(encoded_dim(n, k), points, sample.labels().to_vec())?;
    let h = robust_learner.learn(&encoded)?;
    PhiComposed::new(h, n, k)
}

/// Base dimension `n` with `(2k+1)·n + 1 = dim`.
pub fn base_dim(dim: usize, k: usize) -> Result<usize> {
    let block = 2 * k + 1;
    if dim < 1 + block || !(dim - 1).is_multiple_of(block) {
        return Err(Error::InvalidParameter(format!(
            "dimension {dim} is not (2k+1)n+1 with k={k}, n>=1"
        )));
    }
    Ok((dim - 1) / block)
}

/// Decodes each example by blockwise majority, trains `pac_learner` on the
/// decoded sample and returns `h ∘ maj_{2k+1}`.
pub fn robust_from_pac<L>(pac_learner: &L, sample: &LabeledSample, k: usize) -> Result<Concept>
where
    L: Learner<Hypothesis = Concept>,
{
    let n = base_dim(sample.dim(), k)?;
    let points = sample
        .points()
        .iter()
        .map(|z| maj_decode(z, k, n))
        .collect::<Result<Vec<_>>>()?;
    let decoded = LabeledSample::new(n, points, sample.labels().to_vec())?;
    let h = pac_learner.learn(&decoded)?;
    Concept::majority_encoded(h, k)
}

/// The hypothesis that returns the final input bit.
pub fn last_bit_cheat(dim: usize) -> Result<Concept> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dim must be >= 1".into()));
    }
    Concept::dictator(dim, dim - 1)
}

/// Memorizes the label of every decoded training point; unseen points get
/// `default`.
#[derive(Clone, Copy, Debug)]
pub struct SupportLookupLearner {
    pub k: usize,
    pub default: bool,
}

#[derive(Clone, Debug)]
pub struct SupportLookup {
    dim: usize,
    n: usize,
    k: usize,
    table: HashMap<Point, bool>,
    default: bool,
}

impl Classifier for SupportLookup {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: &Point) -> bool {
        let x = maj_decode(z, self.k, self.n).expect("dimension validated");
        self.table.get(&x).copied().unwrap_or(self.default)
    }
}

impl Learner for SupportLookupLearner {
    type Hypothesis = SupportLookup;

    fn learn(&self, sample: &LabeledSample) -> Result<SupportLookup> {
        let n = base_dim(sample.dim(), self.k)?;
        let mut table = HashMap::new();
        for (z, y) in sample.iter() {
            table.insert(maj_decode(z, self.k, n)?, y);
        }
        Ok(SupportLookup {
            dim: sample.dim(),
            n,
            k: self.k,
            table,
            default: self.default,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::{cube, visit_ball};
    use crate::learners::EliminationLearner;
    use crate::risk::{EvalMode, RiskEngine};
    use std::ops::ControlFlow;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn instance_shape_and_mass() {
        let inst =
            build_reduction_instance(Concept::dictator(3, 0).unwrap(), Distribution::<f64>::uniform(3).unwrap(), 1)
                .unwrap();
        assert_eq!(inst.encoded_concept.dim(), 10);
        assert_eq!(inst.induced_distribution.dim(), 10);
        let total: f64 = inst.induced_distribution.support().unwrap().iter().map(|s| s.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn induced_mass_matches_base_mass() {
        for n in 1..=8 {
            let c = Concept::conjunction(n, (0..n).step_by(2)).unwrap();
            let d = Distribution::<f64>::product((0..n).map(|i| 0.3 + 0.05 * i as f64).collect()).unwrap();
            let inst = build_reduction_instance(c, d.clone(), 1).unwrap();
            for x in cube(n).unwrap() {
                let z = inst.encode(&x).unwrap();
                assert_eq!(inst.induced_distribution.pmf(&z).unwrap(), d.pmf(&x).unwrap());
                let wrong = phi_encode(&x, !inst.base_concept.eval(&x), 1).unwrap();
                assert_eq!(inst.induced_distribution.pmf(&wrong).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn lookup_round_trip_recovers_base_concept() {
        let n = 4;
        let c = Concept::parity(n, [0, 3], false).unwrap();
        let s = LabeledSample::labeled_by(&c, cube(n).unwrap().collect()).unwrap();
        let h = pac_from_robust(&SupportLookupLearner { k: 1, default: false }, &s, 1).unwrap();
        assert!(cube(n).unwrap().all(|x| h.eval(&x) == c.eval(&x)));
        assert_eq!(h.label_bit_sensitivity(s.points()), 0);
    }

    #[test]
    fn k_zero_appends_label() {
        let x = p("0110");
        assert_eq!(phi_encode(&x, true, 0).unwrap(), p("01101"));
        let cheat = last_bit_cheat(5).unwrap();
        let h = PhiComposed::new(cheat, 4, 0).unwrap();
        assert!(h.label_bit_exposed());
        assert_eq!(h.label_bit_sensitivity([&x]), 1);
    }

    #[test]
    fn forward_direction_is_k_stable() {
        let n = 3;
        let k = 1;
        let c = Concept::conjunction(n, [0, 2]).unwrap();
        let inst = build_reduction_instance(c.clone(), Distribution::<f64>::uniform(n).unwrap(), k).unwrap();
        let pts: Vec<Point> = cube(n).unwrap().map(|x| inst.encode(&x).unwrap()).collect();
        let s = LabeledSample::labeled_by(&inst.encoded_concept, pts).unwrap();
        let h = robust_from_pac(&EliminationLearner, &s, k).unwrap();
        assert!(matches!(h, Concept::MajorityEncoded { .. }));
        for x in cube(n).unwrap() {
            for b in [false, true] {
                let z = phi_encode(&x, b, k).unwrap();
                let v = h.eval(&z);
                let broken = visit_ball(&z, k, |w, _| {
                    if h.eval(w) != v { ControlFlow::Break(()) } else { ControlFlow::Continue(()) }
                });
                assert!(broken.is_none());
            }
        }
        let engine = RiskEngine::default();
        let d = &inst.induced_distribution;
        let re = engine.exact_in_ball_risk(&h, &inst.encoded_concept, d, k, EvalMode::Exact).unwrap();
        let rc = engine.constant_in_ball_risk(&h, &inst.encoded_concept, d, k, EvalMode::Exact).unwrap();
        assert_eq!(re.value, 0.0);
        assert_eq!(rc.value, 0.0);
    }

    #[test]
    fn cheat_dichotomy() {
        let inst = build_reduction_instance(
            Concept::dictator(3, 1).unwrap(),
            Distribution::<f64>::uniform(3).unwrap(),
            1,
        )
        .unwrap();
        let cheat = last_bit_cheat(inst.encoded_dim()).unwrap();
        assert!(cheat.eval(&phi_encode(&p("000"), true, 1).unwrap()));
        let engine = RiskEngine::default();
        let d = &inst.induced_distribution;
        let std = engine.disagreement_risk(&cheat, &inst.encoded_concept, d, EvalMode::Exact).unwrap();
        let rc = engine.constant_in_ball_risk(&cheat, &inst.encoded_concept, d, 1, EvalMode::Exact).unwrap();
        assert_eq!(std.value, 0.0);
        assert!((rc.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn base_dim_rejects_bad_shapes() {
        assert_eq!(base_dim(10, 1).unwrap(), 3);
        assert!(base_dim(9, 1).is_err());
        assert!(base_dim(1, 0).is_err());
        assert!(last_bit_cheat(0).is_err());
    }
}
