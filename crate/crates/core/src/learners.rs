//! Learners for monotone conjunctions and the sample-size formulas they use.
//!
//! Logarithms are natural throughout.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::concepts::{Classifier, Concept, MonotoneConjunction};
use crate::error::{check_dim, Error, Result};
use crate::hypercube::Point;

/// Labeled examples of one dimension, optionally with the concept that
/// labeled them.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    dim: usize,
    points: Vec<Point>,
    labels: Vec<bool>,
    target: Option<Concept>,
}

impl LabeledSample {
    pub fn new(dim: usize, points: Vec<Point>, labels: Vec<bool>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        for x in &points {
            check_dim(dim, x.dim())?;
        }
        Ok(LabeledSample {
            dim,
            points,
            labels,
            target: None,
        })
    }

    /// Labels `points` with `target`, which is recorded for audit.
    pub fn labeled_by(target: &Concept, points: Vec<Point>) -> Result<Self> {
        let labels = points
            .iter()
            .map(|x| target.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        let mut s = Self::new(target.dim(), points, labels)?;
        s.target = Some(target.clone());
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn target(&self) -> Option<&Concept> {
        self.target.as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, bool)> {
        self.points.iter().zip(self.labels.iter().copied())
    }

    /// True when a target is recorded and agrees with every label.
    pub fn is_realizable(&self) -> bool {
        self.target
            .as_ref()
            .is_some_and(|t| self.iter().all(|(x, y)| t.eval(x) == y))
    }

    /// Parses `<bitstring> <label>` lines; blank lines and `#` comments are
    /// skipped.
    pub fn read_from(reader: impl BufRead) -> Result<Self> {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(bits), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {}: expected `<bits> <label>`", no + 1)));
            };
            let x: Point = bits
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
            let y = match label {
                "0" => false,
                "1" => true,
                other => return Err(Error::Parse(format!("line {}: bad label {other:?}", no + 1))),
            };
            points.push(x);
            labels.push(y);
        }
        let dim = points
            .first()
            .map(Point::dim)
            .ok_or_else(|| Error::Parse("sample file has no examples".into()))?;
        Self::new(dim, points, labels)
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        for (x, y) in self.iter() {
            writeln!(w, "{x} {}", u8::from(y))?;
        }
        Ok(())
    }
}

/// A learner consuming labeled samples.
pub trait Learner {
    type Hypothesis: Classifier;

    fn learn(&self, sample: &LabeledSample) -> Result<Self::Hypothesis>;

    /// Number of examples the learner asks for, when it declares one.
    fn sample_size(&self, _epsilon: f64, _delta: f64, _dim: usize) -> Option<u64> {
        None
    }
}

/// Learner backed by a closure.
pub struct FnLearner<F>(pub F);

impl<F, H> Learner for FnLearner<F>
where
    F: Fn(&LabeledSample) -> Result<H>,
    H: Classifier,
{
    type Hypothesis = H;

    fn learn(&self, sample: &LabeledSample) -> Result<H> {
        (self.0)(sample)
    }
}

/// Start from every variable; drop `i` whenever a positive example has
/// `x_i = 0`. Returns the largest monotone conjunction consistent with the
/// positive examples.
pub fn learn_monotone_conjunction(sample: &LabeledSample) -> MonotoneConjunction {
    let n = sample.dim();
    let mut keep = Point::ones(n).expect("sample dimension is valid").words().to_vec();
    for (x, y) in sample.iter() {
        if y {
            for (k, w) in keep.iter_mut().zip(x.words()) {
                *k &= w;
            }
        }
    }
    let vars = (0..n).filter(|&i| keep[i / 64] >> (i % 64) & 1 == 1);
    MonotoneConjunction::new(n, vars).expect("indices come from the sample")
}

/// The elimination learner as a [`Learner`].
#[derive(Clone, Copy, Debug, Default)]
pub struct EliminationLearner;

impl Learner for EliminationLearner {
    type Hypothesis = Concept;

    fn learn(&self, sample: &LabeledSample) -> Result<Concept> {
        Ok(Concept::MonotoneConjunction(learn_monotone_conjunction(sample)))
    }
}

/// Exact learning with membership queries: query all-ones, then all-ones
/// with each bit cleared. Uses exactly `n + 1` queries; returns the learned
/// conjunction and the query count.
pub fn exact_learn_membership(
    mut oracle: impl FnMut(&Point) -> bool,
    n: usize,
) -> Result<(MonotoneConjunction, usize)> {
    let ones = Point::ones(n)?;
    let mut queries = 1;
    if !oracle(&ones) {
        return Err(Error::NotMonotoneConjunction);
    }
    let mut vars = Vec::new();
    let mut probe = ones;
    for i in 0..n {
        probe.set(i, false);
        queries += 1;
        if !oracle(&probe) {
            vars.push(i);
        }
        probe.set(i, true);
    }
    Ok((MonotoneConjunction::new(n, vars)?, queries))
}

/// Accuracy, confidence, dimension and log-Lipschitz constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LearnParams {
    pub epsilon: f64,
    pub delta: f64,
    pub n: usize,
    pub alpha: f64,
}

impl LearnParams {
    pub fn new(epsilon: f64, delta: f64, n: usize, alpha: f64) -> Result<Self> {
        let open_half = |v: f64| v > 0.0 && v < 0.5;
        if !open_half(epsilon) || !open_half(delta) {
            return Err(Error::InvalidParameter(format!(
                "epsilon and delta must lie in (0, 1/2); got {epsilon}, {delta}"
            )));
        }
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 1, got {alpha}")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        Ok(LearnParams {
            epsilon,
            delta,
            n,
            alpha,
        })
    }

    pub fn eta(&self) -> f64 {
        1.0 / (1.0 + self.alpha)
    }
}

/// Sample size threshold above which a size is reported as impractical.
pub const PRACTICAL_SAMPLE_LIMIT: u64 = 1_000_000_000;

/// A possibly astronomically large sample size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleSize {
    #[serde(serialize_with = "serialize_big")]
    pub m: BigUint,
    /// `m <= 10^9`.
    pub practical: bool,
}

fn serialize_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl SampleSize {
    fn new(m: BigUint) -> Self {
        let practical = m <= BigUint::from(PRACTICAL_SAMPLE_LIMIT);
        SampleSize { m, practical }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.m.to_u64()
    }
}

impl fmt::Display for SampleSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)
    }
}

/// Full result of the robust sample-size formula.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustSampleSize {
    pub eta: f64,
    /// Length threshold separating the exact-recovery and long-conjunction regimes.
    pub l0: u64,
    pub size: SampleSize,
}

/// `⌈numerator · (1/η)^power⌉` with `1/η = 1 + α` taken exactly from its
/// `f64` value.
fn ceil_scaled_by_inverse_eta_power(numerator: f64, alpha: f64, power: u64) -> Result<BigUint> {
    let num = BigRational::from_float(numerator)
        .ok_or_else(|| Error::InvalidParameter(format!("non-finite numerator {numerator}")))?;
    let base = BigRational::from_float(1.0 + alpha)
        .ok_or_else(|| Error::InvalidParameter(format!("non-finite alpha {alpha}")))?;
    let exp = usize::try_from(power)
        .map_err(|_| Error::InvalidParameter(format!("exponent {power} too large")))?;
    let value = num * num_traits::pow(base, exp);
    let ceil: BigInt = value.ceil().to_integer();
    if ceil.is_negative() {
        return Ok(BigUint::zero());
    }
    Ok(ceil.to_biguint().expect("non-negative"))
}

/// `⌈(ln n − ln δ) / η^{l+1}⌉`: enough samples to recover a length-`l`
/// conjunction exactly with probability `1 − δ`.
pub fn claim1_sample_size(n: usize, delta: f64, eta: f64, l: u64) -> Result<SampleSize> {
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::InvalidParameter(format!("eta must be in (0, 1/2], got {eta}")));
    }
    if !(delta > 0.0 && delta < 1.0) || n < 1 {
        return Err(Error::InvalidParameter("need n >= 1 and delta in (0,1)".into()));
    }
    let alpha = 1.0 / eta - 1.0;
    let num = (n as f64).ln() - delta.ln();
    ceil_scaled_by_inverse_eta_power(num, alpha, l + 1).map(SampleSize::new)
}

/// The length threshold `l_0 = max(⌈(2/η) ln n⌉, ⌈(8/η²) ln(1/ε)⌉)`.
pub fn length_threshold(params: &LearnParams) -> u64 {
    let eta = params.eta();
    let a = (2.0 / eta * (params.n as f64).ln()).ceil();
    let b = (8.0 / (eta * eta) * (1.0 / params.epsilon).ln()).ceil();
    a.max(b) as u64
}

/// `m = ⌈(ln n − ln δ) / η^{l_0+1}⌉` with `η = 1/(1+α)`.
pub fn robust_sample_size(params: &LearnParams) -> Result<RobustSampleSize> {
    let l0 = length_threshold(params);
    let num = (params.n as f64).ln() - params.delta.ln();
    let m = ceil_scaled_by_inverse_eta_power(num, params.alpha, l0 + 1)?;
    Ok(RobustSampleSize {
        eta: params.eta(),
        l0,
        size: SampleSize::new(m),
    })
}

/// Largest `m` with `(1 − 2^{−l})^{2m} ≥ 1/2`, i.e.
/// `⌊ln 2 / (2 ln(2^l/(2^l − 1)))⌋`.
pub fn lemma5_max_sample_size(l: u32) -> Result<u64> {
    if l == 0 {
        return Err(Error::InvalidParameter("l must be >= 1".into()));
    }
    // ln(2^l/(2^l-1)) = -ln(1 - 2^-l)
    let step = -(-(0.5f64).powi(l as i32)).ln_1p();
    let m = (std::f64::consts::LN_2 / (2.0 * step)).floor();
    Ok(m as u64)
}

/// `⌈(1/ε)(ln |C| + ln(1/δ))⌉` for a finite class in the realizable setting.
pub fn pac_sample_size_finite_class(class_size: &BigUint, epsilon: f64, delta: f64) -> Result<u64> {
    if class_size.is_zero() {
        return Err(Error::InvalidParameter("class_size must be >= 1".into()));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter("epsilon and delta must be in (0, 1]".into()));
    }
    let raw = (ln_big(class_size) - delta.ln()) / epsilon;
    // absorb the rounding noise of ln before taking the ceiling
    let rounded = raw.round();
    let m = if (raw - rounded).abs() <= 1e-9 * rounded.abs().max(1.0) {
        rounded
    } else {
        raw.ceil()
    };
    Ok(m as u64)
}

/// Natural log of a big integer.
fn ln_big(v: &BigUint) -> f64 {
    if v.is_one() {
        return 0.0;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Distribution;
    use crate::hypercube::cube;
    use crate::seed::rng_from_seed;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn elimination_examples() {
        let s = LabeledSample::new(3, vec![p("111")], vec![true]).unwrap();
        assert_eq!(learn_monotone_conjunction(&s).vars(), &[0, 1, 2]);
        let s = LabeledSample::new(3, vec![p("101")], vec![true]).unwrap();
        assert_eq!(learn_monotone_conjunction(&s).vars(), &[0, 2]);
        let empty = LabeledSample::new(4, vec![], vec![]).unwrap();
        assert_eq!(learn_monotone_conjunction(&empty).len(), 4);
    }

    #[test]
    fn elimination_is_consistent_maximal_and_order_free() {
        let mut rng = rng_from_seed(4);
        for _ in 0..200 {
            let n = rng.gen_range(2..=20);
            let target = Concept::conjunction(n, (0..n).filter(|_| rng.gen_bool(0.2))).unwrap();
            let d = Distribution::<f64>::product(vec![0.8; n]).unwrap();
            let pts: Vec<Point> = (0..rng.gen_range(0..40)).map(|_| d.sample(&mut rng)).collect();
            let s = LabeledSample::labeled_by(&target, pts.clone()).unwrap();
            assert!(s.is_realizable());
            let h = learn_monotone_conjunction(&s);
            assert!(s.iter().all(|(x, y)| h.eval(x) == y));
            let Concept::MonotoneConjunction(t) = &target else { unreachable!() };
            assert!(t.vars().iter().all(|&i| h.contains(i)));
            let mut shuffled = pts;
            shuffled.shuffle(&mut rng);
            let s2 = LabeledSample::labeled_by(&target, shuffled).unwrap();
            assert_eq!(learn_monotone_conjunction(&s2), h);
        }
    }

    #[test]
    fn membership_examples() {
        let one = Concept::constant(5, true).unwrap();
        let (h, q) = exact_learn_membership(|x| one.eval(x), 5).unwrap();
        assert!(h.is_empty());
        assert_eq!(q, 6);
        let c = Concept::conjunction(3, [0, 2]).unwrap();
        let (h, q) = exact_learn_membership(|x| c.eval(x), 3).unwrap();
        assert_eq!(h.vars(), &[0, 2]);
        assert_eq!(q, 4);
        let zero = Concept::constant(3, false).unwrap();
        assert_eq!(
            exact_learn_membership(|x| zero.eval(x), 3),
            Err(Error::NotMonotoneConjunction)
        );
    }

    #[test]
    fn membership_round_trip() {
        let mut rng = rng_from_seed(8);
        for _ in 0..100 {
            let n = rng.gen_range(1..=30);
            let c = MonotoneConjunction::new(n, (0..n).filter(|_| rng.gen_bool(0.3))).unwrap();
            let (h, q) = exact_learn_membership(|x| c.eval(x), n).unwrap();
            assert_eq!(h, c);
            assert_eq!(q, n + 1);
        }
    }

    #[test]
    fn claim1_size_example() {
        // (ln 16 - ln 0.1)/0.5^4 = 81.2...
        assert_eq!(claim1_sample_size(16, 0.1, 0.5, 3).unwrap().as_u64(), Some(82));
    }

    #[test]
    fn robust_size_threshold_and_monotonicity() {
        let params = LearnParams::new(0.25, 0.1, 32, 1.0).unwrap();
        let r = robust_sample_size(&params).unwrap();
        assert_eq!(r.l0, 45);
        assert!(!r.size.practical);
        // alpha = 3: m ~ 4^46 overflows u64
        let big = robust_sample_size(&LearnParams::new(0.25, 0.1, 32, 3.0).unwrap()).unwrap();
        assert!(big.size.m.bits() > 64);
        let base = |e: f64, d: f64, n: usize, a: f64| {
            robust_sample_size(&LearnParams::new(e, d, n, a).unwrap()).unwrap().size.m
        };
        let m0 = base(0.2, 0.1, 64, 1.5);
        assert!(base(0.2, 0.1, 128, 1.5) >= m0);
        assert!(base(0.2, 0.05, 64, 1.5) >= m0);
        assert!(base(0.1, 0.1, 64, 1.5) >= m0);
        assert!(base(0.2, 0.1, 64, 2.0) >= m0);
        assert!(LearnParams::new(0.5, 0.1, 4, 1.0).is_err());
        assert!(LearnParams::new(0.1, 0.1, 1, 1.0).is_err());
    }

    #[test]
    fn lemma5_examples() {
        assert_eq!(lemma5_max_sample_size(1).unwrap(), 0);
        let m = lemma5_max_sample_size(16).unwrap();
        assert_eq!(m, 22712);
        for l in 1..=30u32 {
            let m = lemma5_max_sample_size(l).unwrap();
            let q = 1.0 - 0.5f64.powi(l as i32);
            assert!(q.powf(2.0 * m as f64) >= 0.5);
            assert!(q.powf(2.0 * (m + 1) as f64) < 0.5);
        }
    }

    #[test]
    fn pac_size_examples() {
        let e1 = (-1f64).exp();
        assert_eq!(pac_sample_size_finite_class(&BigUint::one(), 1.0, e1).unwrap(), 1);
        let c16 = BigUint::one() << 16u32;
        assert_eq!(pac_sample_size_finite_class(&c16, 0.1, 0.05).unwrap(), 141);
        let huge = BigUint::one() << 5000u32;
        let m = pac_sample_size_finite_class(&huge, 0.5, 0.5).unwrap();
        assert_eq!(m, ((5000.0 * std::f64::consts::LN_2 + 2f64.ln()) / 0.5).ceil() as u64);
    }

    #[test]
    fn sample_file_round_trip() {
        let c = Concept::conjunction(4, [1, 3]).unwrap();
        let s = LabeledSample::labeled_by(&c, cube(4).unwrap().collect()).unwrap();
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        let back = LabeledSample::read_from(&buf[..]).unwrap();
        assert_eq!(back.points(), s.points());
        assert_eq!(back.labels(), s.labels());
        assert!(LabeledSample::read_from("0101 2\n".as_bytes()).is_err());
        assert!(LabeledSample::read_from("01 1\n011 0\n".as_bytes()).is_err());
        assert!(LabeledSample::read_from("# only comments\n".as_bytes()).is_err());
    }
}
