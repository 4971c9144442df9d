use thiserror::Error;

/// Errors raised by basis construction, synthesis and reconstruction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("quadrature rule is empty after filtering by the geometry")]
    EmptyQuadrature,

    #[error("spectral cutoff retains no modes (alpha = {alpha:e})")]
    EmptyCutoff { alpha: f64 },

    #[error("data nodes do not match the basis quadrature: {0}")]
    NodeMismatch(String),

    #[error("missing data covers {fraction:.3} of the domain weight (limit 0.1)")]
    InsufficientCoverage { fraction: f64 },

    #[error("setup violates containment: {0}")]
    Containment(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
