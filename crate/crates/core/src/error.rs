use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Boundary data outside the solvable range; the message names the
    /// violated inequality.
    #[error("boundary data out of range: {0}")]
    OutOfRange(String),

    /// An iteration failed to reach its tolerance. Carries the last iterate
    /// so callers can inspect or report partial results.
    #[error("no convergence after {iterations} iterations (last delta {last_delta:.3e}, residual {residual:.3e}) in {context}")]
    NoConvergence {
        context: String,
        iterations: usize,
        last_delta: f64,
        residual: f64,
        last_iterate: Box<crate::grid::RadialField>,
    },

    /// Internal invariant broken; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
