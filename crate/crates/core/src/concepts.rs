//! Boolean concepts on the hypercube and the majority/repetition encoding.
//!
//! Text format, used by configs and reports:
//!
//! ```text
//! conj:0,2          monotone conjunction over positions 0 and 2 ("conj:" is empty = constant 1)
//! dict:3            dictator on position 3
//! parity:0,1;b=1    parity of positions 0,1 plus offset 1 (offset defaults to 0)
//! const:0           constant
//! majenc(k=2):<c>   <c> composed with blockwise majority over 2k+1 copies
//! ```
//!
//! The text does not carry the dimension; parsing takes it separately.

use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::hypercube::{cube, Point};

/// Largest dimension for which exhaustive cube scans are allowed.
pub const EXHAUSTIVE_DIM_LIMIT: usize = 24;

/// Anything that labels points of a fixed-dimension cube.
pub trait Classifier: Send + Sync {
    fn dim(&self) -> usize;

    /// Label of `x`. The caller guarantees `x.dim() == self.dim()`.
    fn eval(&self, x: &Point) -> bool;

    fn evaluate(&self, x: &Point) -> Result<bool> {
        check_dim(self.dim(), x.dim())?;
        Ok(self.eval(x))
    }

    /// Monotone-conjunction view, when the function is one. Enables the
    /// closed-form adversary paths.
    fn as_conjunction(&self) -> Option<MonotoneConjunction> {
        None
    }
}

/// Conjunction of unnegated variables; the empty conjunction is constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonotoneConjunction {
    vars: Vec<usize>,
    mask: Point,
}

impl MonotoneConjunction {
    pub fn new(dim: usize, vars: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut vars: Vec<usize> = vars.into_iter().collect();
        vars.sort_unstable();
        vars.dedup();
        let mask = Point::from_indices(dim, &vars)?;
        Ok(MonotoneConjunction { vars, mask })
    }

    /// Conjunction over every position, the elimination learner's start.
    pub fn full(dim: usize) -> Result<Self> {
        Self::new(dim, 0..dim)
    }

    pub fn dim(&self) -> usize {
        self.mask.dim()
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn mask(&self) -> &Point {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.dim() && self.mask.get(i)
    }

    /// Conjunction over `self.vars() \ other.vars()`.
    pub fn difference_mask(&self, other: &MonotoneConjunction) -> Point {
        let mut m = self.mask.clone();
        for &i in &other.vars {
            m.set(i, false);
        }
        m
    }

    pub fn into_concept(self) -> Concept {
        Concept::MonotoneConjunction(self)
    }
}

impl Classifier for MonotoneConjunction {
    fn dim(&self) -> usize {
        self.mask.dim()
    }

    #[inline]
    fn eval(&self, x: &Point) -> bool {
        x.covers(&self.mask)
    }

    fn as_conjunction(&self) -> Option<MonotoneConjunction> {
        Some(self.clone())
    }
}

/// `(sum of x_i over the index set + offset) mod 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Parity {
    vars: Vec<usize>,
    mask: Point,
    offset: bool,
}

impl Parity {
    pub fn new(dim: usize, vars: impl IntoIterator<Item = usize>, offset: bool) -> Result<Self> {
        let mut vars: Vec<usize> = vars.into_iter().collect();
        vars.sort_unstable();
        vars.dedup();
        let mask = Point::from_indices(dim, &vars)?;
        Ok(Parity { vars, mask, offset })
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn offset(&self) -> bool {
        self.offset
    }
}

/// The concept classes handled by the library.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Concept {
    MonotoneConjunction(MonotoneConjunction),
    Dictator { dim: usize, index: usize },
    Parity(Parity),
    Constant { dim: usize, value: bool },
    /// `inner ∘ maj_{2k+1}` over `(2k+1)·inner.dim() + 1` bits.
    MajorityEncoded { inner: Box<Concept>, k: usize },
}

impl Concept {
    pub fn conjunction(dim: usize, vars: impl IntoIterator<Item = usize>) -> Result<Self> {
        MonotoneConjunction::new(dim, vars).map(Concept::MonotoneConjunction)
    }

    pub fn dictator(dim: usize, index: usize) -> Result<Self> {
        Point::zeros(dim)?;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Ok(Concept::Dictator { dim, index })
    }

    pub fn parity(dim: usize, vars: impl IntoIterator<Item = usize>, offset: bool) -> Result<Self> {
        Parity::new(dim, vars, offset).map(Concept::Parity)
    }

    pub fn constant(dim: usize, value: bool) -> Result<Self> {
        Point::zeros(dim)?;
        Ok(Concept::Constant { dim, value })
    }

    pub fn majority_encoded(inner: Concept, k: usize) -> Result<Self> {
        Point::zeros(encoded_dim(inner.dim(), k))?;
        Ok(Concept::MajorityEncoded {
            inner: Box::new(inner),
            k,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Concept::MonotoneConjunction(c) => c.dim(),
            Concept::Dictator { dim, .. } | Concept::Constant { dim, .. } => *dim,
            Concept::Parity(p) => p.mask.dim(),
            Concept::MajorityEncoded { inner, k } => encoded_dim(inner.dim(), *k),
        }
    }

    /// Positions the concept can depend on.
    pub fn relevant_variables(&self) -> Vec<usize> {
        match self {
            Concept::MonotoneConjunction(c) => c.vars.clone(),
            Concept::Dictator { index, .. } => vec![*index],
            Concept::Parity(p) => p.vars.clone(),
            Concept::Constant { .. } => Vec::new(),
            Concept::MajorityEncoded { inner, k } => {
                let block = 2 * k + 1;
                inner
                    .relevant_variables()
                    .into_iter()
                    .flat_map(|i| i * block..(i + 1) * block)
                    .collect()
            }
        }
    }

    /// Parse the text format at dimension `dim`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let text = text.trim();
        let bad = |msg: &str| Error::Parse(format!("{msg} in concept {text:?}"));
        if let Some(rest) = text.strip_prefix("majenc(") {
            let (params, inner) = rest
                .split_once("):")
                .ok_or_else(|| bad("expected majenc(k=..):<inner>"))?;
            let k: usize = params
                .trim()
                .strip_prefix("k=")
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| bad("bad k"))?;
            let block = 2 * k + 1;
            if dim == 0 || !(dim - 1).is_multiple_of(block) || dim == 1 {
                return Err(Error::Parse(format!(
                    "dimension {dim} is not of the form (2k+1)n+1 for k={k}"
                )));
            }
            let inner = Concept::parse(inner, (dim - 1) / block)?;
            return Concept::majority_encoded(inner, k);
        }
        let (kind, args) = text.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let parse_list = |s: &str| -> Result<Vec<usize>> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad("bad index")))
                .collect()
        };
        let parse_bit = |s: &str| match s.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(bad("bad bit")),
        };
        match kind.trim() {
            "conj" => Concept::conjunction(dim, parse_list(args)?),
            "dict" => {
                let i = args.trim().parse().map_err(|_| bad("bad index"))?;
                Concept::dictator(dim, i)
            }
            "parity" => {
                let (list, offset) = match args.split_once(';') {
                    Some((list, b)) => {
                        let b = b.trim().strip_prefix("b=").ok_or_else(|| bad("expected b="))?;
                        (list, parse_bit(b)?)
                    }
                    None => (args, false),
                };
                Concept::parity(dim, parse_list(list)?, offset)
            }
            "const" => Concept::constant(dim, parse_bit(args)?),
            other => Err(Error::Parse(format!("unknown concept kind {other:?}"))),
        }
    }
}

impl Classifier for Concept {
    fn dim(&self) -> usize {
        Concept::dim(self)
    }

    fn eval(&self, x: &Point) -> bool {
        debug_assert_eq!(x.dim(), Concept::dim(self));
        match self {
            Concept::MonotoneConjunction(c) => x.covers(&c.mask),
            Concept::Dictator { index, .. } => x.get(*index),
            Concept::Parity(p) => x.parity_on(&p.mask) ^ p.offset,
            Concept::Constant { value, .. } => *value,
            Concept::MajorityEncoded { inner, k } => {
                let decoded = maj_decode_unchecked(x, *k, inner.dim());
                inner.eval(&decoded)
            }
        }
    }

    fn as_conjunction(&self) -> Option<MonotoneConjunction> {
        match self {
            Concept::MonotoneConjunction(c) => Some(c.clone()),
            Concept::Dictator { dim, index } => MonotoneConjunction::new(*dim, [*index]).ok(),
            Concept::Constant { dim, value: true } => MonotoneConjunction::new(*dim, []).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| {
            v.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Concept::MonotoneConjunction(c) => write!(f, "conj:{}", list(&c.vars)),
            Concept::Dictator { index, .. } => write!(f, "dict:{index}"),
            Concept::Parity(p) if p.offset => write!(f, "parity:{};b=1", list(&p.vars)),
            Concept::Parity(p) => write!(f, "parity:{}", list(&p.vars)),
            Concept::Constant { value, .. } => write!(f, "const:{}", u8::from(*value)),
            Concept::MajorityEncoded { inner, k } => write!(f, "majenc(k={k}):{inner}"),
        }
    }
}

impl serde::Serialize for Concept {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<MonotoneConjunction> for Concept {
    fn from(c: MonotoneConjunction) -> Self {
        Concept::MonotoneConjunction(c)
    }
}

/// Dimension of the encoded space: `(2k+1)·n + 1`.
pub fn encoded_dim(n: usize, k: usize) -> usize {
    (2 * k + 1) * n + 1
}

/// `φ_k(x, label)`: each bit repeated `2k+1` times in order, then the label.
pub fn phi_encode(x: &Point, label: bool, k: usize) -> Result<Point> {
    let block = 2 * k + 1;
    let mut z = Point::zeros(encoded_dim(x.dim(), k))?;
    for i in x.ones_iter() {
        for j in i * block..(i + 1) * block {
            z.set(j, true);
        }
    }
    z.set(z.dim() - 1, label);
    Ok(z)
}

/// Blockwise majority of `z` over blocks of `2k+1`; the final bit is ignored.
pub fn maj_decode(z: &Point, k: usize, n: usize) -> Result<Point> {
    check_dim(encoded_dim(n, k), z.dim())?;
    Ok(maj_decode_unchecked(z, k, n))
}

fn maj_decode_unchecked(z: &Point, k: usize, n: usize) -> Point {
    let block = 2 * k + 1;
    let mut x = Point::zeros(n).expect("inner dimension validated at construction");
    for i in 0..n {
        let ones = (i * block..(i + 1) * block).filter(|&j| z.get(j)).count();
        if ones > k {
            x.set(i, true);
        }
    }
    x
}

/// Exhaustive functional equality over the whole cube; refuses `dim > 24`.
pub fn concepts_equal_on_cube(c1: &dyn Classifier, c2: &dyn Classifier) -> Result<bool> {
    check_dim(c1.dim(), c2.dim())?;
    if c1.dim() > EXHAUSTIVE_DIM_LIMIT {
        return Err(Error::ExhaustiveLimit {
            dim: c1.dim(),
            limit: EXHAUSTIVE_DIM_LIMIT,
        });
    }
    Ok(cube(c1.dim())?.all(|x| c1.eval(&x) == c2.eval(&x)))
}
