//! Error type shared across the crate.

/// Errors surfaced by domain types, solvers, and evaluation routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("negative or non-finite component at index {index}: {value}")]
    NegativeComponent { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("point is not a member of the technology")]
    InfeasiblePoint,

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("convexity required: {0}")]
    ConvexityRequired(String),

    #[error("technology is unbounded above on the dominating set")]
    UnboundedTechnology,

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("dimension {got} exceeds the enumeration limit {limit}")]
    DimensionLimit { limit: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
