use thiserror::Error;

/// Errors raised by the navigation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed file: {0}")]
    Malformed(String),

    #[error("dimension mismatch: {field} has {got} entries, expected {expected}")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite elevation on navigable cell ({x}, {y})")]
    NonFiniteElevation { x: usize, y: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point ({x:.3}, {y:.3}) is not navigable")]
    NotNavigable { x: f64, y: f64 },

    #[error("target is unreachable")]
    Unreachable,

    #[error("scene parameters are infeasible: {0}")]
    Infeasible(String),

    #[error("unknown node {0}")]
    UnknownNode(usize),

    #[error("no navigable point within {radius} m of the projected target")]
    NoSnap { radius: f64 },

    #[error("distribution does not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("sinkhorn did not converge after {iterations} iterations (marginal error {marginal_error:e})")]
    NotConverged {
        iterations: usize,
        marginal_error: f64,
    },

    #[error("replay log has no decision for step {0}")]
    ReplayMissing(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable kind used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Malformed(_) => "malformed",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NonFiniteElevation { .. } => "non_finite_elevation",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotNavigable { .. } => "not_navigable",
            Error::Unreachable => "unreachable",
            Error::Infeasible(_) => "infeasible",
            Error::UnknownNode(_) => "unknown_node",
            Error::NoSnap { .. } => "no_snap",
            Error::NotNormalized(_) => "not_normalized",
            Error::NotConverged { .. } => "not_converged",
            Error::ReplayMissing(_) => "replay_missing",
            Error::Empty(_) => "empty",
            Error::ModeMismatch(_) => "mode_mismatch",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
