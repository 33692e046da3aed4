//! Distributions on `{0,1}^n`: exact masses, seeded sampling, marginals,
//! conditionals and log-Lipschitz checks.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::concepts::{encoded_dim, maj_decode, phi_encode, Classifier, Concept};
use crate::error::{check_dim, Error, Result};
use crate::hypercube::{cube, Point};
use crate::scalar::Probability;

/// Largest dimension for dense tables and exhaustive edge scans.
pub const TABLE_DIM_LIMIT: usize = 24;

/// Largest dimension whose full cube is enumerated for exact risks.
pub const SUPPORT_DIM_LIMIT: usize = 20;

fn uniform01<P: Probability, R: Rng + ?Sized>(rng: &mut R) -> P {
    P::of(rng.gen::<f64>())
}

fn check_prob<P: Probability>(p: P, what: &str) -> Result<()> {
    if p.is_finite() && p >= P::zero() && p <= P::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} = {p} is not a probability")))
    }
}

#[inline]
fn bernoulli_mass<P: Probability>(p: P, bit: bool) -> P {
    if bit {
        p
    } else {
        P::one() - p
    }
}

/// Independent bits, `p[i] = Pr[x_i = 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Product<P: Probability = f64> {
    p: Vec<P>,
}

impl<P: Probability> Product<P> {
    pub fn new(p: Vec<P>) -> Result<Self> {
        Point::zeros(p.len())?;
        for (i, &pi) in p.iter().enumerate() {
            check_prob(pi, &format!("p[{i}]"))?;
        }
        Ok(Product { p })
    }

    pub fn probs(&self) -> &[P] {
        &self.p
    }

    /// Largest edge mass ratio, `max_i max(p_i/(1-p_i), (1-p_i)/p_i)`.
    pub fn max_edge_ratio(&self) -> P {
        self.p
            .iter()
            .map(|&p| {
                let q = P::one() - p;
                if p <= P::zero() || q <= P::zero() {
                    P::infinity()
                } else {
                    (p / q).max(q / p)
                }
            })
            .fold(P::one(), P::max)
    }
}

/// Dense pmf over the whole cube, indexed by lexicographic rank.
#[derive(Clone, Debug, PartialEq)]
pub struct Table<P: Probability = f64> {
    n: usize,
    pmf: Vec<P>,
    cdf: Vec<P>,
}

impl<P: Probability> Table<P> {
    /// Table from masses in lexicographic order. Masses must be non-negative
    /// and sum to one within the scalar's normalization tolerance.
    pub fn new(n: usize, pmf: Vec<P>) -> Result<Self> {
        if n == 0 || n > TABLE_DIM_LIMIT {
            return Err(Error::ExhaustiveLimit {
                dim: n,
                limit: TABLE_DIM_LIMIT,
            });
        }
        if pmf.len() != 1usize << n {
            return Err(Error::InvalidParameter(format!(
                "table for n={n} needs {} masses, got {}",
                1usize << n,
                pmf.len()
            )));
        }
        if let Some(bad) = pmf.iter().find(|p| !p.is_finite() || **p < P::zero()) {
            return Err(Error::InvalidParameter(format!("negative or non-finite mass {bad}")));
        }
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = P::zero();
        for &p in &pmf {
            acc = acc + p;
            cdf.push(acc);
        }
        if (acc - P::one()).abs() > P::normalization_tolerance() {
            return Err(Error::InvalidParameter(format!("table masses sum to {acc}, not 1")));
        }
        Ok(Table { n, pmf, cdf })
    }

    /// Normalizes non-negative weights into a table.
    pub fn from_weights(n: usize, weights: Vec<P>) -> Result<Self> {
        let total: P = weights.iter().copied().sum();
        if !(total > P::zero()) {
            return Err(Error::InvalidParameter("weights sum to zero".into()));
        }
        Self::new(n, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn masses(&self) -> &[P] {
        &self.pmf
    }

    pub fn mass_at_rank(&self, rank: usize) -> P {
        self.pmf[rank]
    }

    /// Random α-log-Lipschitz table.
    ///
    /// Log-masses are `-s·ln(α)·g(x)` where `g` is a convex combination of
    /// capped Hamming distances to random anchors, hence 1-Lipschitz, and
    /// `s ∈ [1/2, 1]`. Some draws use `s = 1` with a single uncapped anchor so
    /// edges meet the bound with equality.
    pub fn random_log_lipschitz<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Result<Self> {
        if !(alpha >= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} < 1")));
        }
        let anchors = rng.gen_range(1..=4usize);
        let tight = rng.gen_bool(0.25);
        let parts: Vec<(Point, usize, f64)> = (0..anchors)
            .map(|_| {
                let y = Point::random(n, rng)?;
                let cap = if tight { n } else { rng.gen_range(1..=n) };
                Ok((y, cap, rng.gen_range(0.1..1.0)))
            })
            .collect::<Result<_>>()?;
        let parts = if tight { &parts[..1] } else { &parts[..] };
        let wsum: f64 = parts.iter().map(|p| p.2).sum();
        let scale = if tight { 1.0 } else { rng.gen_range(0.5..=1.0) };
        let ln_alpha = alpha.ln();
        let weights = cube(n)?
            .map(|x| {
                let g: f64 = parts
                    .iter()
                    .map(|(y, cap, w)| {
                        let d = crate::hypercube::hamming_distance(&x, y).expect("same dim");
                        w / wsum * d.min(*cap) as f64
                    })
                    .sum();
                P::of((-scale * ln_alpha * g).exp())
            })
            .collect();
        Self::from_weights(n, weights)
    }

    fn sample_rank<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("non-empty table");
        let u = uniform01::<P, _>(rng) * total;
        let idx = self.cdf.partition_point(|&c| c <= u);
        // float slack can push u past the last cumulative value
        let mut idx = idx.min(self.pmf.len() - 1);
        while self.pmf[idx] <= P::zero() && idx > 0 {
            idx -= 1;
        }
        idx
    }
}

/// Groups of positions forced bitwise-equal; remaining positions independent.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupled<P: Probability = f64> {
    n: usize,
    groups: Vec<Vec<usize>>,
    group_bias: Vec<P>,
    free: Vec<usize>,
    free_bias: Vec<P>,
}

impl<P: Probability> Coupled<P> {
    /// `group_bias[g]` is the probability that every bit of group `g` is 1;
    /// `bit_bias[i]` is used for positions not in any group.
    pub fn new(n: usize, groups: Vec<Vec<usize>>, group_bias: Vec<P>, bit_bias: Vec<P>) -> Result<Self> {
        Point::zeros(n)?;
        if groups.len() != group_bias.len() {
            return Err(Error::InvalidParameter("one bias per group required".into()));
        }
        if bit_bias.len() != n {
            return Err(Error::InvalidParameter(format!("bit_bias needs {n} entries")));
        }
        let mut owner = vec![None; n];
        for (g, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidParameter("empty coupling group".into()));
            }
            for &i in group {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, dim: n });
                }
                if owner[i].replace(g).is_some() {
                    return Err(Error::InvalidParameter(format!("position {i} in two groups")));
                }
            }
        }
        for (g, &b) in group_bias.iter().enumerate() {
            check_prob(b, &format!("group_bias[{g}]"))?;
        }
        let free: Vec<usize> = (0..n).filter(|&i| owner[i].is_none()).collect();
        let free_bias = free.iter().map(|&i| bit_bias[i]).collect::<Vec<_>>();
        for (&i, &b) in free.iter().zip(&free_bias) {
            check_prob(b, &format!("bit_bias[{i}]"))?;
        }
        Ok(Coupled {
            n,
            groups,
            group_bias,
            free,
            free_bias,
        })
    }

    /// Two positions forced equal, every bit fair otherwise.
    pub fn fair_pair(n: usize, a: usize, b: usize) -> Result<Self> {
        Self::new(n, vec![vec![a, b]], vec![P::of(0.5)], vec![P::of(0.5); n])
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

/// Push-forward of `base` through `x ↦ φ_k(x, concept(x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Induced<P: Probability = f64> {
    base: Distribution<P>,
    concept: Concept,
    k: usize,
}

impl<P: Probability> Induced<P> {
    pub fn new(base: Distribution<P>, concept: Concept, k: usize) -> Result<Self> {
        check_dim(base.dim(), concept.dim())?;
        Point::zeros(encoded_dim(base.dim(), k))?;
        Ok(Induced { base, concept, k })
    }

    pub fn base(&self) -> &Distribution<P> {
        &self.base
    }

    pub fn concept(&self) -> &Concept {
        &self.concept
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn encode(&self, x: &Point) -> Point {
        phi_encode(x, self.concept.eval(x), self.k).expect("dimension validated")
    }
}

/// A distribution over the hypercube.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution<P: Probability = f64> {
    Uniform { n: usize },
    Product(Product<P>),
    Table(Table<P>),
    Coupled(Coupled<P>),
    Induced(Box<Induced<P>>),
}

/// Outcome of a log-Lipschitz check.
#[derive(Clone, Debug, PartialEq)]
pub enum LipschitzCheck<P: Probability = f64> {
    Holds { max_ratio: P },
    Violated { max_ratio: P, edge: Option<(Point, Point)> },
    /// A point with zero mass; never log-Lipschitz.
    ZeroMass { point: Option<Point> },
}

impl<P: Probability> LipschitzCheck<P> {
    pub fn holds(&self) -> bool {
        matches!(self, LipschitzCheck::Holds { .. })
    }
}

/// The log-Lipschitz constant and its derived `η = 1/(1+α)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogLipschitzParam {
    alpha: f64,
    eta: f64,
}

impl LogLipschitzParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 1, got {alpha}")));
        }
        Ok(LogLipschitzParam {
            alpha,
            eta: 1.0 / (1.0 + alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl<P: Probability> Distribution<P> {
    pub fn uniform(n: usize) -> Result<Self> {
        Point::zeros(n)?;
        Ok(Distribution::Uniform { n })
    }

    pub fn product(p: Vec<P>) -> Result<Self> {
        Product::new(p).map(Distribution::Product)
    }

    pub fn table(n: usize, pmf: Vec<P>) -> Result<Self> {
        Table::new(n, pmf).map(Distribution::Table)
    }

    pub fn induced(base: Distribution<P>, concept: Concept, k: usize) -> Result<Self> {
        Induced::new(base, concept, k).map(|d| Distribution::Induced(Box::new(d)))
    }

    pub fn dim(&self) -> usize {
        match self {
            Distribution::Uniform { n } => *n,
            Distribution::Product(p) => p.p.len(),
            Distribution::Table(t) => t.n,
            Distribution::Coupled(c) => c.n,
            Distribution::Induced(d) => encoded_dim(d.base.dim(), d.k),
        }
    }

    /// Exact probability mass at `x`.
    pub fn pmf(&self, x: &Point) -> Result<P> {
        check_dim(self.dim(), x.dim())?;
        Ok(match self {
            Distribution::Uniform { n } => P::of(0.5).powi(*n as i32),
            Distribution::Product(p) => p
                .p
                .iter()
                .enumerate()
                .map(|(i, &pi)| bernoulli_mass(pi, x.get(i)))
                .fold(P::one(), |a, b| a * b),
            Distribution::Table(t) => t.pmf[x.rank().expect("table dims fit a rank") as usize],
            Distribution::Coupled(c) => {
                let mut mass = P::one();
                for (group, &bias) in c.groups.iter().zip(&c.group_bias) {
                    let v = x.get(group[0]);
                    if group.iter().any(|&i| x.get(i) != v) {
                        return Ok(P::zero());
                    }
                    mass = mass * bernoulli_mass(bias, v);
                }
                for (&i, &b) in c.free.iter().zip(&c.free_bias) {
                    mass = mass * bernoulli_mass(b, x.get(i));
                }
                mass
            }
            Distribution::Induced(d) => {
                let base_x = maj_decode(x, d.k, d.base.dim())?;
                if d.encode(&base_x) == *x {
                    d.base.pmf(&base_x)?
                } else {
                    P::zero()
                }
            }
        })
    }

    /// One draw; deterministic given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Distribution::Uniform { n } => Point::random(*n, rng).expect("valid dim"),
            Distribution::Product(p) => {
                let mut x = Point::zeros(p.p.len()).expect("valid dim");
                for (i, &pi) in p.p.iter().enumerate() {
                    if uniform01::<P, _>(rng) < pi {
                        x.set(i, true);
                    }
                }
                x
            }
            Distribution::Table(t) => {
                Point::from_rank(t.n, t.sample_rank(rng) as u64).expect("table dim fits")
            }
            Distribution::Coupled(c) => {
                let mut x = Point::zeros(c.n).expect("valid dim");
                for (group, &bias) in c.groups.iter().zip(&c.group_bias) {
                    if uniform01::<P, _>(rng) < bias {
                        group.iter().for_each(|&i| x.set(i, true));
                    }
                }
                for (&i, &b) in c.free.iter().zip(&c.free_bias) {
                    if uniform01::<P, _>(rng) < b {
                        x.set(i, true);
                    }
                }
                x
            }
            Distribution::Induced(d) => {
                let x = d.base.sample(rng);
                d.encode(&x)
            }
        }
    }

    /// Whether [`Distribution::support`] can enumerate this distribution.
    pub fn is_enumerable(&self) -> bool {
        match self {
            Distribution::Table(_) => true,
            Distribution::Induced(d) => d.base.is_enumerable(),
            other => other.dim() <= SUPPORT_DIM_LIMIT,
        }
    }

    /// Points of positive mass with their masses, in lexicographic order of
    /// the underlying enumeration.
    pub fn support(&self) -> Result<Vec<(Point, P)>> {
        match self {
            Distribution::Table(t) => Ok(t
                .pmf
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > P::zero())
                .map(|(r, &p)| (Point::from_rank(t.n, r as u64).expect("fits"), p))
                .collect()),
            Distribution::Induced(d) => Ok(d
                .base
                .support()?
                .into_iter()
                .map(|(x, p)| (d.encode(&x), p))
                .collect()),
            other => {
                let n = other.dim();
                if n > SUPPORT_DIM_LIMIT {
                    return Err(Error::NotEnumerable(format!(
                        "dimension {n} exceeds the exact-enumeration limit {SUPPORT_DIM_LIMIT}"
                    )));
                }
                cube(n)?
                    .map(|x| other.pmf(&x).map(|p| (x, p)))
                    .filter(|r| !matches!(r, Ok((_, p)) if *p <= P::zero()))
                    .collect()
            }
        }
    }

    /// Dense table over the whole cube (`dim <= 24`).
    pub fn to_table(&self) -> Result<Table<P>> {
        if let Distribution::Table(t) = self {
            return Ok(t.clone());
        }
        let n = self.dim();
        if n > TABLE_DIM_LIMIT {
            return Err(Error::ExhaustiveLimit {
                dim: n,
                limit: TABLE_DIM_LIMIT,
            });
        }
        let pmf = cube(n)?.map(|x| self.pmf(&x)).collect::<Result<Vec<_>>>()?;
        Table::from_weights(n, pmf)
    }

    /// `Pr[x_i = 1]`.
    pub fn bit_probability(&self, i: usize) -> Result<P> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim(),
            });
        }
        match self {
            Distribution::Uniform { .. } => Ok(P::of(0.5)),
            Distribution::Product(p) => Ok(p.p[i]),
            _ => {
                let t = self.to_table()?;
                Ok(t
                    .pmf
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| (r >> (t.n - 1 - i)) & 1 == 1)
                    .map(|(_, &p)| p)
                    .sum())
            }
        }
    }

    /// Marginal on the complement of `removed`, as a table over the kept
    /// positions in increasing order: `D_S̄(y) = Σ_{y'} D(y y')`.
    pub fn marginal(&self, removed: &[usize]) -> Result<Distribution<P>> {
        self.conditional(removed, |_| true)
    }

    /// Restricts to the event that the bits at `positions` satisfy `event`
    /// (which sees them as a point in `positions` order), renormalizes, and
    /// marginalizes onto the complement of `positions`.
    pub fn conditional(
        &self,
        positions: &[usize],
        event: impl Fn(&Point) -> bool,
    ) -> Result<Distribution<P>> {
        let n = self.dim();
        let table = self.to_table()?;
        let mut is_conditioned = vec![false; n];
        for &i in positions {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            is_conditioned[i] = true;
        }
        let kept: Vec<usize> = (0..n).filter(|&i| !is_conditioned[i]).collect();
        if kept.is_empty() {
            return Err(Error::InvalidParameter("cannot marginalize every position".into()));
        }
        let mut cond: Vec<usize> = positions.to_vec();
        cond.dedup();
        let mut out = vec![P::zero(); 1usize << kept.len()];
        let mut event_cache: BTreeMap<u64, bool> = BTreeMap::new();
        for (r, &p) in table.pmf.iter().enumerate() {
            if p <= P::zero() {
                continue;
            }
            let x = Point::from_rank(n, r as u64)?;
            let satisfied = if cond.is_empty() {
                event(&Point::zeros(1)?)
            } else {
                let proj = x.project(&cond)?;
                let key = proj.rank().unwrap_or(u64::MAX);
                *event_cache.entry(key).or_insert_with(|| event(&proj))
            };
            if satisfied {
                let y = x.project(&kept)?;
                let idx = y.rank().expect("kept fits") as usize;
                out[idx] = out[idx] + p;
            }
        }
        let mass: P = out.iter().copied().sum();
        if !(mass > P::zero()) {
            return Err(Error::ZeroMassEvent);
        }
        Table::new(kept.len(), out.into_iter().map(|p| p / mass).collect()).map(Distribution::Table)
    }

    /// Checks `|log D(x) - log D(x')| <= log α` on every hypercube edge.
    pub fn verify_log_lipschitz(&self, alpha: P) -> Result<LipschitzCheck<P>> {
        if !(alpha >= P::one()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 1, got {alpha}")));
        }
        let bound = alpha * (P::one() + P::ratio_tolerance());
        let verdict = |max_ratio: P, edge| {
            if max_ratio <= bound {
                LipschitzCheck::Holds { max_ratio }
            } else {
                LipschitzCheck::Violated { max_ratio, edge }
            }
        };
        match self {
            Distribution::Uniform { .. } => Ok(LipschitzCheck::Holds { max_ratio: P::one() }),
            Distribution::Product(p) => {
                if p.p.iter().any(|&q| q <= P::zero() || q >= P::one()) {
                    return Ok(LipschitzCheck::ZeroMass { point: None });
                }
                Ok(verdict(p.max_edge_ratio(), None))
            }
            Distribution::Coupled(c) => {
                if c.groups.iter().any(|g| g.len() > 1) {
                    let mut x = Point::zeros(c.n)?;
                    x.set(c.groups.iter().find(|g| g.len() > 1).expect("exists")[0], true);
                    return Ok(LipschitzCheck::ZeroMass { point: Some(x) });
                }
                let mut p = vec![P::zero(); c.n];
                for (g, &b) in c.groups.iter().zip(&c.group_bias) {
                    p[g[0]] = b;
                }
                for (&i, &b) in c.free.iter().zip(&c.free_bias) {
                    p[i] = b;
                }
                Distribution::product(p)?.verify_log_lipschitz(alpha)
            }
            Distribution::Induced(_) => Ok(LipschitzCheck::ZeroMass { point: None }),
            Distribution::Table(t) => {
                if let Some(r) = t.pmf.iter().position(|&p| p <= P::zero()) {
                    return Ok(LipschitzCheck::ZeroMass {
                        point: Some(Point::from_rank(t.n, r as u64)?),
                    });
                }
                let mut max_ratio = P::one();
                let mut worst = None;
                for r in 0..t.pmf.len() {
                    for b in 0..t.n {
                        let s = r ^ (1 << b);
                        if s < r {
                            continue;
                        }
                        let (a, c) = (t.pmf[r], t.pmf[s]);
                        let ratio = a.max(c) / a.min(c);
                        if ratio > max_ratio {
                            max_ratio = ratio;
                            worst = Some((r, s));
                        }
                    }
                }
                let edge = match worst {
                    Some((r, s)) if max_ratio > bound => Some((
                        Point::from_rank(t.n, r as u64)?,
                        Point::from_rank(t.n, s as u64)?,
                    )),
                    _ => None,
                };
                Ok(verdict(max_ratio, edge))
            }
        }
    }
}

/// Product distribution that makes `c1` and `c2` hard to tell apart.
///
/// Finds the first point `z` (lexicographic) where the concepts agree but a
/// single flip of a relevant bit makes them disagree, then biases every
/// relevant bit toward `z` with probability `1 - eta` and leaves the others
/// fair. Returns the distribution and `z`.
pub fn build_hiding_distribution<P: Probability>(
    c1: &Concept,
    c2: &Concept,
    eta: P,
) -> Result<(Distribution<P>, Point)> {
    check_dim(c1.dim(), c2.dim())?;
    check_prob(eta, "eta")?;
    let n = c1.dim();
    if n > TABLE_DIM_LIMIT {
        return Err(Error::ExhaustiveLimit {
            dim: n,
            limit: TABLE_DIM_LIMIT,
        });
    }
    let mut relevant: Vec<usize> = c1.relevant_variables();
    relevant.extend(c2.relevant_variables());
    relevant.sort_unstable();
    relevant.dedup();
    let mut probe = Point::zeros(n)?;
    let z = cube(n)?
        .find(|z| {
            c1.eval(z) == c2.eval(z)
                && relevant.iter().any(|&i| {
                    probe.clone_from(z);
                    probe.toggle(i);
                    c1.eval(&probe) != c2.eval(&probe)
                })
        })
        .ok_or(Error::TrivialPair)?;
    let half = P::of(0.5);
    let mut p = vec![half; n];
    for &i in &relevant {
        p[i] = if z.get(i) { P::one() - eta } else { eta };
    }
    Ok((Distribution::product(p)?, z))
}

/// JSON description of a distribution.
///
/// ```json
/// {"kind":"uniform","n":10}
/// {"kind":"product","p":[0.75,0.75]}
/// {"kind":"table","n":2,"pmf":{"00":0.5,"11":0.5}}
/// {"kind":"coupled","n":4,"groups":[[0,1]],"group_bias":[0.5],"bias":[0.5,0.5,0.5,0.5]}
/// {"kind":"induced","base":{"kind":"uniform","n":3},"concept":"conj:0,1","k":2}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Uniform {
        n: usize,
    },
    Product {
        p: Vec<f64>,
    },
    Table {
        n: usize,
        pmf: BTreeMap<String, f64>,
    },
    Coupled {
        n: usize,
        groups: Vec<Vec<usize>>,
        #[serde(default)]
        group_bias: Option<Vec<f64>>,
        #[serde(default)]
        bias: Option<Vec<f64>>,
    },
    Induced {
        base: Box<DistributionSpec>,
        concept: String,
        k: usize,
    },
}

impl DistributionSpec {
    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::Uniform { n }
            | DistributionSpec::Table { n, .. }
            | DistributionSpec::Coupled { n, .. } => *n,
            DistributionSpec::Product { p } => p.len(),
            DistributionSpec::Induced { base, k, .. } => encoded_dim(base.dim(), *k),
        }
    }

    pub fn build<P: Probability>(&self) -> Result<Distribution<P>> {
        match self {
            DistributionSpec::Uniform { n } => Distribution::uniform(*n),
            DistributionSpec::Product { p } => {
                Distribution::product(p.iter().map(|&v| P::of(v)).collect())
            }
            DistributionSpec::Table { n, pmf } => {
                if *n > TABLE_DIM_LIMIT {
                    return Err(Error::ExhaustiveLimit {
                        dim: *n,
                        limit: TABLE_DIM_LIMIT,
                    });
                }
                let mut dense = vec![P::zero(); 1usize << n];
                for (k, &v) in pmf {
                    let x: Point = k.parse()?;
                    check_dim(*n, x.dim())?;
                    dense[x.rank().expect("fits") as usize] = P::of(v);
                }
                Distribution::table(*n, dense)
            }
            DistributionSpec::Coupled {
                n,
                groups,
                group_bias,
                bias,
            } => {
                let gb = group_bias.clone().unwrap_or_else(|| vec![0.5; groups.len()]);
                let bb = bias.clone().unwrap_or_else(|| vec![0.5; *n]);
                Coupled::new(
                    *n,
                    groups.clone(),
                    gb.into_iter().map(P::of).collect(),
                    bb.into_iter().map(P::of).collect(),
                )
                .map(Distribution::Coupled)
            }
            DistributionSpec::Induced { base, concept, k } => {
                let base_dist = base.build()?;
                let c = Concept::parse(concept, base.dim())?;
                Distribution::induced(base_dist, c, *k)
            }
        }
    }

    /// Short command-line form: `uniform:<n>` or `product:<p0>,<p1>,...`.
    pub fn parse_short(text: &str) -> Result<Self> {
        let (kind, arg) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected kind:args, got {text:?}")))?;
        match kind {
            "uniform" => Ok(DistributionSpec::Uniform {
                n: arg.trim().parse().map_err(|_| Error::Parse(format!("bad n in {text:?}")))?,
            }),
            "product" => Ok(DistributionSpec::Product {
                p: arg
                    .split(',')
                    .map(|v| v.trim().parse().map_err(|_| Error::Parse(format!("bad p in {text:?}"))))
                    .collect::<Result<_>>()?,
            }),
            other => Err(Error::Parse(format!("unknown short distribution kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn table_of(d: &Distribution<f64>) -> Vec<f64> {
        d.to_table().unwrap().masses().to_vec()
    }

    #[test]
    fn pmf_examples() {
        let u = Distribution::<f64>::uniform(3).unwrap();
        assert_eq!(u.pmf(&p("101")).unwrap(), 0.125);
        let prod = Distribution::<f64>::product(vec![0.75, 0.75]).unwrap();
        assert!((prod.pmf(&p("11")).unwrap() - 0.5625).abs() < 1e-15);
        let c = Concept::dictator(2, 0).unwrap();
        let ind = Distribution::induced(Distribution::<f64>::uniform(2).unwrap(), c, 0).unwrap();
        // φ_0(10, 1) = 101; 100 is off-support
        assert_eq!(ind.pmf(&p("100")).unwrap(), 0.0);
        assert_eq!(ind.pmf(&p("101")).unwrap(), 0.25);
        assert!(u.pmf(&p("10")).is_err());
    }

    #[test]
    fn pmfs_are_normalized() {
        let dists: Vec<Distribution<f64>> = vec![
            Distribution::uniform(5).unwrap(),
            Distribution::product(vec![0.1, 0.9, 0.3]).unwrap(),
            Distribution::Coupled(Coupled::fair_pair(4, 0, 1).unwrap()),
            Distribution::induced(
                Distribution::product(vec![0.2, 0.7]).unwrap(),
                Concept::conjunction(2, [0, 1]).unwrap(),
                1,
            )
            .unwrap(),
        ];
        for d in dists {
            let total: f64 = cube(d.dim()).unwrap().map(|x| d.pmf(&x).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12, "{d:?} sums to {total}");
            let sup: f64 = d.support().unwrap().iter().map(|s| s.1).sum();
            assert!((sup - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn table_rejects_bad_masses() {
        assert!(Table::<f64>::new(1, vec![0.5, 0.4]).is_err());
        assert!(Table::<f64>::new(1, vec![1.5, -0.5]).is_err());
        assert!(Table::<f64>::new(2, vec![1.0, 0.0]).is_err());
        assert!(Table::<f64>::new(25, vec![]).is_err());
    }

    #[test]
    fn uniform_bit_means_are_fair() {
        let d = Distribution::<f64>::uniform(10).unwrap();
        let mut rng = rng_from_seed(11);
        let draws = 1_000_000;
        let mut counts = [0u32; 10];
        for _ in 0..draws {
            let x = d.sample(&mut rng);
            for (i, c) in counts.iter_mut().enumerate() {
                *c += u32::from(x.get(i));
            }
        }
        for c in counts {
            let m = f64::from(c) / draws as f64;
            assert!((0.497..=0.503).contains(&m), "bit mean {m}");
        }
    }

    #[test]
    fn samples_respect_structure() {
        let mut rng = rng_from_seed(5);
        let coupled = Distribution::<f64>::Coupled(Coupled::fair_pair(5, 0, 1).unwrap());
        let c = Concept::conjunction(3, [0, 2]).unwrap();
        let ind = Distribution::induced(Distribution::<f64>::uniform(3).unwrap(), c.clone(), 2).unwrap();
        for _ in 0..2000 {
            let x = coupled.sample(&mut rng);
            assert_eq!(x.get(0), x.get(1));
            let z = ind.sample(&mut rng);
            let base = maj_decode(&z, 2, 3).unwrap();
            assert_eq!(z.get(z.dim() - 1), c.eval(&base));
            assert!(ind.pmf(&z).unwrap() > 0.0);
        }
    }

    fn total_variation(d: &Distribution<f64>, draws: u32, seed: u64) -> f64 {
        let mut rng = rng_from_seed(seed);
        let exact = table_of(d);
        let mut hist = vec![0u32; exact.len()];
        for _ in 0..draws {
            hist[d.sample(&mut rng).rank().unwrap() as usize] += 1;
        }
        hist.iter()
            .zip(&exact)
            .map(|(&h, &e)| (f64::from(h) / f64::from(draws) - e).abs())
            .sum::<f64>()
            / 2.0
    }

    // Sampling noise alone puts E[TV] near sqrt(1/(2 pi N)) * sum sqrt(p);
    // that is ~0.0128 for 1024 near-equal cells at N = 10^6, so the 0.01
    // bound is checked on a concentrated distribution and the flat one is
    // held to its own noise floor.
    #[test]
    fn histogram_converges_in_total_variation() {
        let prod = Distribution::<f64>::product(vec![0.9; 10]).unwrap();
        assert!(total_variation(&prod, 1_000_000, 99) < 0.01);
        let table = Distribution::Table(prod.to_table().unwrap());
        assert!(total_variation(&table, 1_000_000, 100) < 0.01);

        let mut rng = rng_from_seed(99);
        let flat = Distribution::<f64>::Table(Table::random_log_lipschitz(10, 3.0, &mut rng).unwrap());
        let floor = (1.0 / (2.0 * std::f64::consts::PI * 1e6)).sqrt()
            * table_of(&flat).iter().map(|p| p.sqrt()).sum::<f64>();
        let tv = total_variation(&flat, 1_000_000, 101);
        assert!(tv < 1.2 * floor, "total variation {tv}, noise floor {floor}");
    }

    #[test]
    fn log_lipschitz_examples() {
        let u = Distribution::<f64>::uniform(6).unwrap();
        assert!(u.verify_log_lipschitz(1.0).unwrap().holds());
        let prod = Distribution::product(vec![0.75; 5]).unwrap();
        assert!(prod.verify_log_lipschitz(3.0).unwrap().holds());
        assert!(!prod.verify_log_lipschitz(2.9).unwrap().holds());
        // the table scan agrees with the closed form
        let t = Distribution::Table(prod.to_table().unwrap());
        assert!(t.verify_log_lipschitz(3.0).unwrap().holds());
        assert!(!t.verify_log_lipschitz(2.9).unwrap().holds());
        let ind = Distribution::induced(
            Distribution::<f64>::uniform(2).unwrap(),
            Concept::dictator(2, 0).unwrap(),
            1,
        )
        .unwrap();
        assert!(matches!(
            ind.verify_log_lipschitz(100.0).unwrap(),
            LipschitzCheck::ZeroMass { .. }
        ));
        let coupled = Distribution::<f64>::Coupled(Coupled::fair_pair(3, 0, 1).unwrap());
        assert!(matches!(
            coupled.verify_log_lipschitz(10.0).unwrap(),
            LipschitzCheck::ZeroMass { .. }
        ));
    }

    #[test]
    fn marginal_examples() {
        let u = Distribution::<f64>::uniform(4).unwrap();
        let m = u.marginal(&[3]).unwrap();
        assert_eq!(m.dim(), 3);
        assert!(table_of(&m).iter().all(|&v| (v - 0.125).abs() < 1e-15));

        let probs = vec![0.1, 0.35, 0.5, 0.62, 0.8, 0.95];
        let prod = Distribution::product(probs.clone()).unwrap();
        let removed = [1, 4];
        let m = prod.marginal(&removed).unwrap();
        let kept: Vec<f64> = [0, 2, 3, 5].iter().map(|&i| probs[i]).collect();
        let expect = table_of(&Distribution::product(kept).unwrap());
        for (a, b) in table_of(&m).iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let total: f64 = table_of(&m).iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_examples() {
        let u = Distribution::<f64>::uniform(3).unwrap();
        let c = u.conditional(&[0], |b| b.get(0)).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(table_of(&c).iter().all(|&v| (v - 0.25).abs() < 1e-15));

        let prod = Distribution::product(vec![0.6; 4]).unwrap();
        let c = prod.conditional(&[0], |b| b.get(0)).unwrap();
        let expect = table_of(&Distribution::product(vec![0.6; 3]).unwrap());
        for (a, b) in table_of(&c).iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let coupled = Distribution::<f64>::Coupled(Coupled::fair_pair(3, 0, 1).unwrap());
        assert!(matches!(
            coupled.conditional(&[0, 1], |b| b.get(0) != b.get(1)),
            Err(Error::ZeroMassEvent)
        ));
    }

    #[test]
    fn marginals_and_conditionals_stay_log_lipschitz() {
        let mut rng = rng_from_seed(2024);
        for trial in 0..30 {
            let n = 3 + trial % 6;
            let alpha = [1.0, 2.0, 3.0][trial % 3];
            let d = Distribution::<f64>::Table(Table::random_log_lipschitz(n, alpha, &mut rng).unwrap());
            assert!(d.verify_log_lipschitz(alpha).unwrap().holds());
            let s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).take(n - 1).collect();
            assert!(d.marginal(&s).unwrap().verify_log_lipschitz(alpha).unwrap().holds());
            if !s.is_empty() {
                let c = d.conditional(&s, |b| b.count_ones() % 2 == 0).unwrap();
                assert!(c.verify_log_lipschitz(alpha).unwrap().holds());
            }
        }
    }

    #[test]
    fn hiding_distribution_examples() {
        let c1 = Concept::dictator(3, 0).unwrap();
        let c2 = Concept::dictator(3, 1).unwrap();
        let (d, z) = build_hiding_distribution::<f64>(&c1, &c2, 0.1).unwrap();
        assert_eq!(z.get(0), z.get(1));
        assert_eq!(c1.eval(&z), c2.eval(&z));
        let Distribution::Product(prod) = &d else { panic!("product expected") };
        let agree = |i: usize| if z.get(i) { prod.probs()[i] } else { 1.0 - prod.probs()[i] };
        assert!((agree(0) - 0.9).abs() < 1e-15 && (agree(1) - 0.9).abs() < 1e-15);
        assert_eq!(prod.probs()[2], 0.5);
        // Pr[x_I = z_I] = (1-η)^{|I|}
        let hit: f64 = cube(3)
            .unwrap()
            .filter(|x| x.get(0) == z.get(0) && x.get(1) == z.get(1))
            .map(|x| d.pmf(&x).unwrap())
            .sum();
        assert!((hit - 0.81).abs() < 1e-12);

        let (d0, z0) = build_hiding_distribution::<f64>(&c1, &c2, 0.0).unwrap();
        assert_eq!(d0.pmf(&z0).unwrap(), 0.5);

        let same = Concept::constant(3, true).unwrap();
        let other = Concept::constant(3, false).unwrap();
        assert_eq!(
            build_hiding_distribution::<f64>(&same, &other, 0.1),
            Err(Error::TrivialPair)
        );
    }

    #[test]
    fn single_precision_works() {
        let d = Distribution::<f32>::product(vec![0.75; 3]).unwrap();
        assert!((d.pmf(&p("111")).unwrap() - 0.421875).abs() < 1e-6);
        assert!(d.verify_log_lipschitz(3.0).unwrap().holds());
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"kind":"induced","base":{"kind":"product","p":[0.5,0.25]},"concept":"conj:0,1","k":1}"#;
        let spec: DistributionSpec = serde_json::from_str(text).unwrap();
        let d: Distribution<f64> = spec.build().unwrap();
        assert_eq!(d.dim(), 7);
        let table = r#"{"kind":"table","n":2,"pmf":{"00":0.5,"11":0.5}}"#;
        let d: Distribution<f64> = serde_json::from_str::<DistributionSpec>(table).unwrap().build().unwrap();
        assert_eq!(d.pmf(&p("11")).unwrap(), 0.5);
        let coupled = r#"{"kind":"coupled","n":3,"groups":[[0,1]]}"#;
        let d: Distribution<f64> = serde_json::from_str::<DistributionSpec>(coupled).unwrap().build().unwrap();
        assert_eq!(d.pmf(&p("100")).unwrap(), 0.0);
        assert!(serde_json::from_str::<DistributionSpec>(r#"{"kind":"gauss"}"#).is_err());
        assert_eq!(DistributionSpec::parse_short("uniform:4").unwrap(), DistributionSpec::Uniform { n: 4 });
    }
}
