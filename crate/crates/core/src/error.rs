use thiserror::Error;

/// Errors raised by the hypercube, concept, distribution and risk machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {dim} (must be in 1..={max})")]
    InvalidDimension { dim: usize, max: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("radius {radius} exceeds dimension {dim}")]
    RadiusTooLarge { radius: usize, dim: usize },

    #[error("exhaustive computation refused at dimension {dim} (limit {limit})")]
    ExhaustiveLimit { dim: usize, limit: usize },

    #[error("intractable: ball of {points} points exceeds the enumeration limit {limit}")]
    Intractable { points: String, limit: u64 },

    #[error("distribution support is not enumerable: {0}")]
    NotEnumerable(String),

    #[error("conditioning event has zero mass")]
    ZeroMassEvent,

    #[error("concept pair is trivial: no agreeing point sits one relevant flip from a disagreement")]
    TrivialPair,

    #[error("membership oracle labels the all-ones point 0; not a monotone conjunction")]
    NotMonotoneConjunction,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
