//! Decides whether a perturbation of at most `ρ` bits exists that makes two
//! classifiers disagree (exact-in-the-ball) or changes the label relative to
//! the centre's true label (constant-in-the-ball).
//!
//! Brute force walks the ball in canonical order; monotone conjunctions get
//! closed forms for the minimum number of flips. Both paths report the
//! smallest witness distance, so one query answers every radius.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use serde::Serialize;

use crate::concepts::{Classifier, MonotoneConjunction};
use crate::error::{check_dim, Error, Result};
use crate::hypercube::{ball_size, visit_ball, Point};

/// Default cap on points enumerated by one brute-force query.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 100_000_000;

/// Result of one attack query at radius `rho`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttackResult {
    pub feasible: bool,
    /// Smallest distance of a witness; `None` when no witness exists within
    /// the searched range (for closed forms: at any distance).
    pub min_flips: Option<usize>,
    pub witness: Option<Point>,
}

impl AttackResult {
    fn from_min(min_flips: Option<usize>, rho: usize, witness: impl FnOnce() -> Point) -> Self {
        let feasible = matches!(min_flips, Some(d) if d <= rho);
        AttackResult {
            feasible,
            min_flips,
            witness: feasible.then(witness),
        }
    }
}

/// Which search routine answered a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    FastPath,
    BruteForce,
}

/// Attack engine with a configurable brute-force budget.
#[derive(Clone, Copy, Debug)]
pub struct Adversary {
    pub enumeration_limit: u64,
    /// Disable closed forms; used to cross-check them.
    pub brute_force_only: bool,
}

impl Default for Adversary {
    fn default() -> Self {
        Adversary {
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            brute_force_only: false,
        }
    }
}

impl Adversary {
    pub fn brute_force() -> Self {
        Adversary {
            brute_force_only: true,
            ..Self::default()
        }
    }

    fn check_budget(&self, n: usize, rho: usize) -> Result<()> {
        let size = ball_size(n, rho)?;
        if size > BigUint::from(self.enumeration_limit) {
            return Err(Error::Intractable {
                points: size.to_string(),
                limit: self.enumeration_limit,
            });
        }
        Ok(())
    }

    /// Route that [`Adversary::exists_disagreement_in_ball`] would take.
    pub fn disagreement_route(&self, h: &dyn Classifier, c: &dyn Classifier) -> Route {
        if !self.brute_force_only && h.as_conjunction().is_some() && c.as_conjunction().is_some() {
            Route::FastPath
        } else {
            Route::BruteForce
        }
    }

    pub fn label_change_route(&self, h: &dyn Classifier) -> Route {
        if !self.brute_force_only && h.as_conjunction().is_some() {
            Route::FastPath
        } else {
            Route::BruteForce
        }
    }

    /// Is there `z ∈ B_rho(x)` with `h(z) != c(z)`?
    pub fn exists_disagreement_in_ball(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        x: &Point,
        rho: usize,
    ) -> Result<AttackResult> {
        check_dim(h.dim(), c.dim())?;
        check_dim(h.dim(), x.dim())?;
        if rho > x.dim() {
            return Err(Error::RadiusTooLarge {
                radius: rho,
                dim: x.dim(),
            });
        }
        if !self.brute_force_only {
            if let (Some(hc), Some(cc)) = (h.as_conjunction(), c.as_conjunction()) {
                let (d, _) = conj_pair_plan(&hc, &cc, x);
                return Ok(AttackResult::from_min(d, rho, || {
                    conj_pair_witness(&hc, &cc, x).expect("finite distance has a witness")
                }));
            }
        }
        self.check_budget(x.dim(), rho)?;
        Ok(brute_force(x, rho, |z| h.eval(z) != c.eval(z)))
    }

    /// Is there `z ∈ B_rho(x)` with `h(z) != c(x)`?
    pub fn exists_label_change_in_ball(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        x: &Point,
        rho: usize,
    ) -> Result<AttackResult> {
        check_dim(h.dim(), c.dim())?;
        check_dim(h.dim(), x.dim())?;
        if rho > x.dim() {
            return Err(Error::RadiusTooLarge {
                radius: rho,
                dim: x.dim(),
            });
        }
        let label = c.eval(x);
        if !self.brute_force_only {
            if let Some(hc) = h.as_conjunction() {
                let d = min_flips_to_label(&hc, x, !label);
                return Ok(AttackResult::from_min(d, rho, || {
                    label_witness(&hc, x, !label).expect("finite distance has a witness")
                }));
            }
        }
        self.check_budget(x.dim(), rho)?;
        Ok(brute_force(x, rho, |z| h.eval(z) != label))
    }

    /// Smallest number of flips producing a disagreement, capped at `max_rho`;
    /// `None` means no witness up to `max_rho`.
    pub fn min_flips_disagreement(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        x: &Point,
        max_rho: usize,
    ) -> Result<Option<usize>> {
        let r = self.exists_disagreement_in_ball(h, c, x, max_rho)?;
        Ok(r.min_flips.filter(|&d| d <= max_rho))
    }

    pub fn min_flips_label_change(
        &self,
        h: &dyn Classifier,
        c: &dyn Classifier,
        x: &Point,
        max_rho: usize,
    ) -> Result<Option<usize>> {
        let r = self.exists_label_change_in_ball(h, c, x, max_rho)?;
        Ok(r.min_flips.filter(|&d| d <= max_rho))
    }
}

fn brute_force(x: &Point, rho: usize, pred: impl Fn(&Point) -> bool) -> AttackResult {
    let hit = visit_ball(x, rho, |z, flips| {
        if pred(z) {
            ControlFlow::Break((z.clone(), flips.len()))
        } else {
            ControlFlow::Continue(())
        }
    });
    match hit {
        Some((w, d)) => AttackResult {
            feasible: true,
            min_flips: Some(d),
            witness: Some(w),
        },
        None => AttackResult {
            feasible: false,
            min_flips: None,
            witness: None,
        },
    }
}

/// Brute-force disagreement search, independent of the closed forms.
pub fn brute_force_disagreement(
    h: &dyn Classifier,
    c: &dyn Classifier,
    x: &Point,
    rho: usize,
) -> Result<AttackResult> {
    Adversary::brute_force().exists_disagreement_in_ball(h, c, x, rho)
}

/// Brute-force label-change search, independent of the closed forms.
pub fn brute_force_label_change(
    h: &dyn Classifier,
    c: &dyn Classifier,
    x: &Point,
    rho: usize,
) -> Result<AttackResult> {
    Adversary::brute_force().exists_label_change_in_ball(h, c, x, rho)
}

/// Number of zeros of `x` on the conjunction's variables; `c` can be made
/// true within `ρ` flips iff this is `<= ρ`.
pub fn min_flips_to_satisfy(c: &MonotoneConjunction, x: &Point) -> usize {
    x.zeros_on(c.mask())
}

/// Minimum flips to force `h(z) = target`.
fn min_flips_to_label(h: &MonotoneConjunction, x: &Point, target: bool) -> Option<usize> {
    if target {
        Some(min_flips_to_satisfy(h, x))
    } else if !h.eval(x) {
        Some(0)
    } else if h.is_empty() {
        None
    } else {
        Some(1)
    }
}

fn label_witness(h: &MonotoneConjunction, x: &Point, target: bool) -> Option<Point> {
    let mut z = x.clone();
    if target {
        for &i in h.vars() {
            z.set(i, true);
        }
    } else if h.eval(x) {
        z.set(*h.vars().first()?, false);
    }
    Some(z)
}

/// Flips needed to make `a` true and `b` false, starting from `x`.
fn orientation_cost(a: &MonotoneConjunction, b: &MonotoneConjunction, x: &Point) -> Option<usize> {
    let only_b = b.difference_mask(a);
    if only_b.count_ones() == 0 {
        return None;
    }
    let extra = if x.first_zero_on(&only_b).is_some() { 0 } else { 1 };
    Some(x.zeros_on(a.mask()) + extra)
}

/// Closed-form minimum distance to a disagreement of two conjunctions, with
/// the orientation achieving it (`true`: `c1 = 1, c2 = 0`).
fn conj_pair_plan(
    c1: &MonotoneConjunction,
    c2: &MonotoneConjunction,
    x: &Point,
) -> (Option<usize>, bool) {
    match (orientation_cost(c1, c2, x), orientation_cost(c2, c1, x)) {
        (Some(a), Some(b)) if b < a => (Some(b), false),
        (Some(a), _) => (Some(a), true),
        (None, b) => (b, false),
    }
}

fn conj_pair_witness(c1: &MonotoneConjunction, c2: &MonotoneConjunction, x: &Point) -> Option<Point> {
    let (d, first_true) = conj_pair_plan(c1, c2, x);
    d?;
    let (a, b) = if first_true { (c1, c2) } else { (c2, c1) };
    let mut z = x.clone();
    for &i in a.vars() {
        z.set(i, true);
    }
    let only_b = b.difference_mask(a);
    if x.first_zero_on(&only_b).is_none() {
        let i = only_b.ones_iter().next()?;
        z.set(i, false);
    }
    Some(z)
}

/// Minimum Hamming distance from `x` to a point where `c1` and `c2` disagree;
/// `None` iff the two conjunctions have the same variable set.
pub fn min_flips_conj_pair(c1: &MonotoneConjunction, c2: &MonotoneConjunction, x: &Point) -> Option<usize> {
    conj_pair_plan(c1, c2, x).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::Concept;
    use crate::hypercube::{cube, hamming_distance};
    use crate::seed::rng_from_seed;
    use rand::Rng;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn conj(n: usize, v: &[usize]) -> MonotoneConjunction {
        MonotoneConjunction::new(n, v.iter().copied()).unwrap()
    }

    /// Independent oracle: scan the whole cube for the nearest disagreement.
    fn nearest_by_scan(f: impl Fn(&Point) -> bool, x: &Point) -> Option<usize> {
        cube(x.dim())
            .unwrap()
            .filter(|z| f(z))
            .map(|z| hamming_distance(&z, x).unwrap())
            .min()
    }

    fn random_conj(n: usize, rng: &mut impl Rng) -> MonotoneConjunction {
        let pr = rng.gen_range(0.0..0.6);
        conj(n, &(0..n).filter(|_| rng.gen_bool(pr)).collect::<Vec<_>>())
    }

    #[test]
    fn identical_concepts_never_disagree() {
        let c = Concept::parity(4, [0, 2], true).unwrap();
        let r = Adversary::default()
            .exists_disagreement_in_ball(&c, &c, &p("0110"), 4)
            .unwrap();
        assert!(!r.feasible);
        assert_eq!(r.min_flips, None);
        let cj = conj(4, &[1, 2]);
        assert_eq!(min_flips_conj_pair(&cj, &cj, &p("0000")), None);
    }

    #[test]
    fn dictators_flip_one_bit() {
        let h = Concept::dictator(2, 0).unwrap();
        let c = Concept::dictator(2, 1).unwrap();
        for adv in [Adversary::default(), Adversary::brute_force()] {
            let r = adv.exists_disagreement_in_ball(&h, &c, &p("11"), 1).unwrap();
            assert!(r.feasible);
            assert_eq!(r.min_flips, Some(1));
            let w = r.witness.unwrap();
            assert!(w == p("01") || w == p("10"));
        }
    }

    #[test]
    fn conj_pair_examples() {
        assert_eq!(min_flips_conj_pair(&conj(2, &[0]), &conj(2, &[1]), &p("11")), Some(1));
        assert_eq!(min_flips_conj_pair(&conj(3, &[0]), &conj(3, &[0, 1]), &p("000")), Some(1));
        // nested: only c1 = 1, c2 = 0 is possible
        assert_eq!(min_flips_conj_pair(&conj(3, &[0]), &conj(3, &[0, 1]), &p("110")), Some(1));
    }

    #[test]
    fn satisfy_examples() {
        assert_eq!(min_flips_to_satisfy(&conj(4, &[0, 1, 2]), &p("1111")), 0);
        assert_eq!(min_flips_to_satisfy(&conj(4, &[0, 1, 2]), &p("0000")), 3);
    }

    #[test]
    fn conj_pair_matches_cube_scan_exhaustively() {
        let mut rng = rng_from_seed(10);
        for _ in 0..50 {
            let n = 8;
            let (a, b) = (random_conj(n, &mut rng), random_conj(n, &mut rng));
            for x in cube(n).unwrap() {
                let expect = nearest_by_scan(|z| a.eval(z) != b.eval(z), &x);
                assert_eq!(min_flips_conj_pair(&a, &b, &x), expect, "{a:?} {b:?} {x}");
                assert_eq!(min_flips_conj_pair(&b, &a, &x), expect);
            }
        }
    }

    #[test]
    fn label_change_matches_cube_scan() {
        let mut rng = rng_from_seed(12);
        for _ in 0..50 {
            let n = 7;
            let h = random_conj(n, &mut rng);
            let c = random_conj(n, &mut rng);
            for x in cube(n).unwrap() {
                let y = c.eval(&x);
                let expect = nearest_by_scan(|z| h.eval(z) != y, &x);
                let got = Adversary::default()
                    .exists_label_change_in_ball(&h, &c, &x, n)
                    .unwrap()
                    .min_flips;
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn witnesses_are_valid_and_monotone_in_rho() {
        let mut rng = rng_from_seed(13);
        let adv = Adversary::default();
        for _ in 0..500 {
            let n = rng.gen_range(2..=12);
            let (a, b) = (random_conj(n, &mut rng), random_conj(n, &mut rng));
            let x = Point::random(n, &mut rng).unwrap();
            let mut was = false;
            for rho in 0..=n.min(4) {
                let r = adv.exists_disagreement_in_ball(&a, &b, &x, rho).unwrap();
                assert!(!was || r.feasible);
                was = r.feasible;
                assert_eq!(r.feasible, r.min_flips.is_some_and(|d| d <= rho));
                if let Some(w) = &r.witness {
                    assert!(hamming_distance(w, &x).unwrap() <= rho);
                    assert_ne!(a.eval(w), b.eval(w));
                }
                let l = adv.exists_label_change_in_ball(&a, &b, &x, rho).unwrap();
                if let Some(w) = &l.witness {
                    assert!(hamming_distance(w, &x).unwrap() <= rho);
                    assert_ne!(a.eval(w), b.eval(&x));
                }
            }
        }
    }

    #[test]
    fn parity_label_changes_everywhere() {
        let f = Concept::parity(5, [1, 3], false).unwrap();
        for x in cube(5).unwrap() {
            let r = Adversary::default().exists_label_change_in_ball(&f, &f, &x, 1).unwrap();
            assert!(r.feasible);
        }
        let one = Concept::constant(5, true).unwrap();
        for x in cube(5).unwrap() {
            let r = Adversary::default().exists_label_change_in_ball(&one, &one, &x, 5).unwrap();
            assert!(!r.feasible);
        }
    }

    #[test]
    fn intractable_and_bad_radius() {
        let c = Concept::parity(64, [0], false).unwrap();
        let x = Point::zeros(64).unwrap();
        assert!(matches!(
            Adversary::default().exists_disagreement_in_ball(&c, &c, &x, 10),
            Err(Error::Intractable { .. })
        ));
        assert!(matches!(
            Adversary::default().exists_disagreement_in_ball(&c, &c, &x, 65),
            Err(Error::RadiusTooLarge { .. })
        ));
        // closed forms have no budget
        let a = Concept::conjunction(64, 0..16).unwrap();
        let b = Concept::conjunction(64, 16..32).unwrap();
        assert!(Adversary::default().exists_disagreement_in_ball(&a, &b, &x, 40).unwrap().feasible);
    }
}
