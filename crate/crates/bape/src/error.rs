//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A linear-algebra step failed even after the jitter ladder was
    /// exhausted. `jitter` is the last diagonal boost that was attempted.
    #[error("numerical failure in {context} (last jitter {jitter:e})")]
    NumericalFailure { context: String, jitter: f64 },

    /// Every log-value handed to the normalizer was -inf.
    #[error("degenerate density: no node carries finite log-mass")]
    DegenerateDensity,

    /// The expensive-likelihood oracle failed.
    #[error(transparent)]
    Oracle(#[from] OracleError),

    /// A sampling-based estimator could not produce an estimate.
    #[error("estimation failure: {0}")]
    EstimationFailure(String),
}

/// Failures surfaced by likelihood oracles, including the subprocess adapter.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle rejected query: {0}")]
    Eval(String),

    #[error("simulator timed out after {timeout_secs} s")]
    Timeout { timeout_secs: f64 },

    /// The raw line is preserved for diagnosis.
    #[error("malformed simulator response: {line:?}")]
    Malformed { line: String },

    #[error("simulator process failed: {0}")]
    ProcessDied(String),

    #[error("replay log mismatch at query {index}")]
    ReplayMismatch { index: usize },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
