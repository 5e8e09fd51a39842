use thiserror::Error;

use crate::dmodule::SeriesReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("value {0} lies outside the nonnegative cone D+")]
    NotInCone(String),

    #[error("zero divisor: idempotent component {component} has modulus {modulus:e}")]
    ZeroDivisor { component: u8, modulus: f64 },

    #[error("not strictly positive: components ({a1:e}, {a2:e})")]
    NotStrictlyPositive { a1: f64, a2: f64 },

    #[error("supremum/infimum of an empty set")]
    EmptySet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("series not converged after {} terms", .0.terms)]
    NotConverged(Box<SeriesReport>),

    #[error("singular value iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("right-hand side not in range: residual ({r1:e}, {r2:e}) exceeds tolerance")]
    NotInRange { r1: f64, r2: f64 },

    #[error("operator not surjective: ranks ({rank1}, {rank2}) of {rows} rows")]
    NotSurjective {
        rank1: usize,
        rank2: usize,
        rows: usize,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
