//! Scalar abstraction for probabilities and risk values.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating scalar used for probability masses, risks and confidence radii.
///
/// Implemented for `f32` and `f64`. Every distribution and risk routine is
/// generic over it; the crate root exposes `f64` aliases.
pub trait Probability:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + serde::Serialize
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal or computed constant.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to every Probability scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Probability scalars convert to f64")
    }

    /// Tolerance used when checking that a pmf sums to one.
    fn normalization_tolerance() -> Self;

    /// Relative slack allowed when comparing mass ratios against a bound.
    fn ratio_tolerance() -> Self;
}

impl Probability for f64 {
    fn normalization_tolerance() -> Self {
        1e-12
    }

    fn ratio_tolerance() -> Self {
        1e-9
    }
}

impl Probability for f32 {
    fn normalization_tolerance() -> Self {
        1e-5
    }

    fn ratio_tolerance() -> Self {
        1e-4
    }
}
