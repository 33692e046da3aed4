//! Robust risks on the boolean hypercube: points and Hamming balls, concept
//! classes, distributions, perturbation search, risk estimation, learners for
//! monotone conjunctions and the label-embedding reduction.
//!
//! Probability-valued code is generic over [`Probability`] (`f32` or `f64`);
//! the aliases below fix the scalar.

// `!(x > 0)` style guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod concepts;
pub mod distributions;
pub mod error;
pub mod hypercube;
pub mod learners;
pub mod reduction;
pub mod risk;
pub mod scalar;
pub mod seed;

pub use adversary::{Adversary, AttackResult, Route};
pub use concepts::{Classifier, Concept, MonotoneConjunction, Parity};
pub use distributions::{Distribution, DistributionSpec, LipschitzCheck, LogLipschitzParam};
pub use error::{Error, Result};
pub use hypercube::{ball_size, hamming_distance, BallSpec, Point};
pub use learners::{LabeledSample, LearnParams, Learner};
pub use reduction::ReductionInstance;
pub use risk::{EvalMode, RiskEngine, RiskEstimate, RiskKind};
pub use scalar::Probability;

pub type Distribution64 = Distribution<f64>;
pub type Distribution32 = Distribution<f32>;
pub type RiskEstimate64 = RiskEstimate<f64>;
pub type RiskEstimate32 = RiskEstimate<f32>;
pub type ReductionInstance64 = ReductionInstance<f64>;
pub type ReductionInstance32 = ReductionInstance<f32>;
pub type LipschitzCheck64 = LipschitzCheck<f64>;
pub type LipschitzCheck32 = LipschitzCheck<f32>;
