use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("not Hermitian (max entrywise deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0:.12})")]
    InvalidTrace(f64),

    #[error("state vector is not normalized (norm {0:.12})")]
    NotNormalized(f64),

    #[error("not a probability vector: {0}")]
    InvalidProbability(String),

    #[error("channel is not trace preserving (max deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource guard exceeded: {what} = {got} exceeds limit {limit}")]
    GuardExceeded {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("solver did not converge after {iterations} iterations (best value {best_value:.9}, certificate gap {gap:.3e})")]
    NonConvergence {
        iterations: usize,
        best_value: f64,
        gap: f64,
        /// Best iterate found, so callers can still inspect the result.
        best: Box<crate::solver::CapacityResult>,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
