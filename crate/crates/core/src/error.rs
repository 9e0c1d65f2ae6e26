use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),

    #[error("load is not finite at ({x}, {y})")]
    NonFiniteLoad { x: f64, y: f64 },

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("dense solve limited to {cap} unknowns, got {size}")]
    TooLarge { size: usize, cap: usize },

    #[error("{context}: {source}")]
    Level {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the failure came from a linear solve, possibly wrapped in level context.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NotConverged { .. } | Error::NotPositiveDefinite { .. } | Error::TooLarge { .. } => true,
            Error::Level { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }

    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Config(_) | Error::Argument(_) | Error::UnknownCase(_) | Error::Json(_) => true,
            Error::Level { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
