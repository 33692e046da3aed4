//! Points of `{0,1}^n`, Hamming distance and Hamming-ball enumeration.
//!
//! Bit position 0 is the leftmost character of the text rendering, so
//! `"1000"` has only position 0 set. Lexicographic order on strings is the
//! order used for cube enumeration, ranks and table layouts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{check_dim, Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4096;

const WORD: usize = 64;

fn words_for(dim: usize) -> usize {
    dim.div_ceil(WORD)
}

/// A point of the boolean hypercube, packed into 64-bit words.
///
/// Bits at positions `>= dim` are always clear.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    dim: usize,
    words: Vec<u64>,
}

impl Point {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidDimension { dim, max: MAX_DIM });
        }
        Ok(Point {
            dim,
            words: vec![0; words_for(dim)],
        })
    }

    pub fn ones(dim: usize) -> Result<Self> {
        let mut p = Self::zeros(dim)?;
        p.words.iter_mut().for_each(|w| *w = u64::MAX);
        p.clear_tail();
        Ok(p)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut p = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            p.set(i, b);
        }
        Ok(p)
    }

    /// Point with exactly the given positions set.
    pub fn from_indices(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut p = Self::zeros(dim)?;
        for &i in indices {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            p.set(i, true);
        }
        Ok(p)
    }

    /// Inverse of [`Point::rank`]: position 0 is the most significant of the
    /// `dim` low bits of `rank`. Requires `dim <= 64`.
    pub fn from_rank(dim: usize, rank: u64) -> Result<Self> {
        if dim > 64 {
            return Err(Error::ExhaustiveLimit { dim, limit: 64 });
        }
        let mut p = Self::zeros(dim)?;
        for i in 0..dim {
            if (rank >> (dim - 1 - i)) & 1 == 1 {
                p.set(i, true);
            }
        }
        Ok(p)
    }

    /// Index of this point in lexicographic order, when `dim <= 64`.
    pub fn rank(&self) -> Option<u64> {
        if self.dim > 64 {
            return None;
        }
        let w = self.words[0].reverse_bits();
        Some(if self.dim == 64 { w } else { w >> (64 - self.dim) })
    }

    /// Uniformly random point.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::zeros(dim)?;
        p.words.iter_mut().for_each(|w| *w = rng.gen());
        p.clear_tail();
        Ok(p)
    }

    fn clear_tail(&mut self) {
        let rem = self.dim % WORD;
        if rem != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << rem) - 1;
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit at position `i`. Panics when `i >= dim`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Copy of `self` with the bits at `indices` inverted.
    pub fn flip(&self, indices: &[usize]) -> Result<Point> {
        let mut out = self.clone();
        for &i in indices {
            if i >= self.dim {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    dim: self.dim,
                });
            }
            out.toggle(i);
        }
        Ok(out)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Positions of `mask` where `self` is 0. Dimensions must agree.
    #[inline]
    pub fn zeros_on(&self, mask: &Point) -> usize {
        debug_assert_eq!(self.dim, mask.dim);
        self.words
            .iter()
            .zip(&mask.words)
            .map(|(x, m)| (m & !x).count_ones() as usize)
            .sum()
    }

    /// True when every position set in `mask` is set in `self`.
    #[inline]
    pub fn covers(&self, mask: &Point) -> bool {
        debug_assert_eq!(self.dim, mask.dim);
        self.words.iter().zip(&mask.words).all(|(x, m)| m & !x == 0)
    }

    /// Parity of the positions of `mask` set in `self`.
    #[inline]
    pub fn parity_on(&self, mask: &Point) -> bool {
        debug_assert_eq!(self.dim, mask.dim);
        self.words
            .iter()
            .zip(&mask.words)
            .fold(0u32, |acc, (x, m)| acc ^ (x & m).count_ones())
            & 1
            == 1
    }

    /// First position of `mask` (in index order) where `self` is 0.
    pub fn first_zero_on(&self, mask: &Point) -> Option<usize> {
        debug_assert_eq!(self.dim, mask.dim);
        self.words
            .iter()
            .zip(&mask.words)
            .enumerate()
            .find_map(|(wi, (x, m))| {
                let z = m & !x;
                (z != 0).then(|| wi * WORD + z.trailing_zeros() as usize)
            })
    }

    /// Positions set to 1, in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    /// Restriction of `self` to `positions`, in the order given.
    pub fn project(&self, positions: &[usize]) -> Result<Point> {
        let mut out = Point::zeros(positions.len())?;
        for (j, &i) in positions.iter().enumerate() {
            if i >= self.dim {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    dim: self.dim,
                });
            }
            out.set(j, self.get(i));
        }
        Ok(out)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }
}

impl Ord for Point {
    /// Lexicographic order of the string rendering; shorter points first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| {
            self.words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a.reverse_bits().cmp(&b.reverse_bits()))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.dim)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({self})")
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::Parse("empty point".into()));
        }
        Point::from_bits(&bits)
    }
}

impl serde::Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of positions where `x` and `y` differ.
pub fn hamming_distance(x: &Point, y: &Point) -> Result<usize> {
    check_dim(x.dim, y.dim)?;
    Ok(x.words
        .iter()
        .zip(&y.words)
        .map(|(a, b)| (a ^ b).count_ones() as usize)
        .sum())
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `|B_rho(x)|` in `{0,1}^n`: the sum of `C(n, i)` for `i` in `0..=rho`.
pub fn ball_size(n: usize, rho: usize) -> Result<BigUint> {
    if rho > n {
        return Err(Error::RadiusTooLarge { radius: rho, dim: n });
    }
    let mut total = BigUint::zero();
    let mut term = BigUint::one();
    for i in 0..=rho {
        total += &term;
        term = term * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    Ok(total)
}

/// A Hamming ball: centre and radius, with `radius <= dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallSpec {
    center: Point,
    radius: usize,
}

impl BallSpec {
    pub fn new(center: Point, radius: usize) -> Result<Self> {
        if radius > center.dim() {
            return Err(Error::RadiusTooLarge {
                radius,
                dim: center.dim(),
            });
        }
        Ok(BallSpec { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn size(&self) -> BigUint {
        ball_size(self.center.dim(), self.radius).expect("radius checked at construction")
    }

    pub fn iter(&self) -> BallIter {
        enumerate_ball(self)
    }
}

/// Advances `comb` to the next `comb.len()`-subset of `0..n` in lexicographic
/// order. Returns false once the last subset has been passed.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let d = comb.len();
    let Some(i) = (0..d).rev().find(|&i| comb[i] < n - d + i) else {
        return false;
    };
    comb[i] += 1;
    for j in i + 1..d {
        comb[j] = comb[j - 1] + 1;
    }
    true
}

/// Stream of the points of a ball, by increasing distance from the centre and
/// then by the lexicographic order of the flipped index sets.
#[derive(Clone, Debug)]
pub struct BallIter {
    center: Point,
    radius: usize,
    comb: Vec<usize>,
    done: bool,
}

pub fn enumerate_ball(spec: &BallSpec) -> BallIter {
    BallIter {
        center: spec.center.clone(),
        radius: spec.radius,
        comb: Vec::new(),
        done: false,
    }
}

impl Iterator for BallIter {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.done {
            return None;
        }
        let mut out = self.center.clone();
        for &i in &self.comb {
            out.toggle(i);
        }
        let n = self.center.dim();
        if !next_combination(&mut self.comb, n) {
            let d = self.comb.len() + 1;
            if d > self.radius {
                self.done = true;
            } else {
                self.comb = (0..d).collect();
            }
        }
        Some(out)
    }
}

/// Visits every point of `B_radius(center)` in canonical ball order without
/// allocating per point. The callback sees the point and the flipped index
/// set; returning `Break` stops the walk.
pub fn visit_ball<T>(
    center: &Point,
    radius: usize,
    mut f: impl FnMut(&Point, &[usize]) -> ControlFlow<T>,
) -> Option<T> {
    let n = center.dim();
    let radius = radius.min(n);
    let mut work = center.clone();
    if let ControlFlow::Break(t) = f(&work, &[]) {
        return Some(t);
    }
    for d in 1..=radius {
        let mut comb: Vec<usize> = (0..d).collect();
        loop {
            for &i in &comb {
                work.toggle(i);
            }
            let flow = f(&work, &comb);
            for &i in &comb {
                work.toggle(i);
            }
            if let ControlFlow::Break(t) = flow {
                return Some(t);
            }
            if !next_combination(&mut comb, n) {
                break;
            }
        }
    }
    None
}

/// All points of `{0,1}^n` in lexicographic order. Requires `n <= 63`.
pub fn cube(n: usize) -> Result<impl Iterator<Item = Point>> {
    if n == 0 || n > 63 {
        return Err(Error::ExhaustiveLimit { dim: n, limit: 63 });
    }
    Ok((0..1u64 << n).map(move |r| Point::from_rank(n, r).expect("n checked")))
}
