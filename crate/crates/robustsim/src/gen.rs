//! Random concepts and distributions for property checks.

use rand::seq::index::sample;
use rand::Rng;
use robustsim_core::distributions::{Coupled, Table};
use robustsim_core::{Concept, Distribution, Result};

/// Random subset of `0..n`, each index kept with probability `p`.
pub fn random_subset<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

/// Random non-empty subset of `0..n` of a uniformly chosen size.
pub fn random_nonempty_subset<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let size = rng.gen_range(1..=n);
    let mut v = sample(rng, n, size).into_vec();
    v.sort_unstable();
    v
}

/// A conjunction, dictator, parity or constant over `n` bits.
pub fn random_concept<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Concept> {
    match rng.gen_range(0..8) {
        0..=3 => Concept::conjunction(n, random_subset(n, rng.gen_range(0.1..0.6), rng)),
        4 => Concept::dictator(n, rng.gen_range(0..n)),
        5 | 6 => Concept::parity(n, random_subset(n, 0.4, rng), rng.gen_bool(0.5)),
        _ => Concept::constant(n, rng.gen_bool(0.5)),
    }
}

/// Monotone conjunction over a random subset.
pub fn random_conjunction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Concept> {
    Concept::conjunction(n, random_subset(n, rng.gen_range(0.05..0.7), rng))
}

/// Uniform, product, dense or sparse table, or coupled, over `n <= 16` bits.
pub fn random_distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Distribution> {
    match rng.gen_range(0..5) {
        0 => Distribution::uniform(n),
        1 => Distribution::product((0..n).map(|_| rng.gen_range(0.05..0.95)).collect()),
        2 => {
            let w = (0..1usize << n).map(|_| rng.gen_range(0.0..1.0)).collect();
            Table::from_weights(n, w).map(Distribution::Table)
        }
        3 => random_sparse_table(n, rng),
        _ => {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let groups = if a == b { vec![vec![a]] } else { vec![vec![a, b]] };
            let bias = (0..n).map(|_| rng.gen_range(0.1..0.9)).collect();
            Coupled::new(n, groups, vec![rng.gen_range(0.1..0.9)], bias).map(Distribution::Coupled)
        }
    }
}

/// Table supported on between 1 and 6 random points.
pub fn random_sparse_table<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Distribution> {
    let size = 1usize << n;
    let mut w = vec![0.0; size];
    for _ in 0..rng.gen_range(1..=6) {
        w[rng.gen_range(0..size)] += rng.gen_range(0.05..1.0);
    }
    Table::from_weights(n, w).map(Distribution::Table)
}
