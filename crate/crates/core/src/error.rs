use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Inversion requested with `Re r = 0`, where the averaging map is not boundedly invertible.
    #[error("ill-posed parameters: Re r = {re_r} (inversion requires Re r != 0)")]
    IllPosed { re_r: f64 },

    /// Modes (1-based) whose averaging factor is below the division threshold.
    #[error("degenerate modes (|zeta_k| <= {threshold:e}): {modes:?}")]
    DegenerateModes { modes: Vec<usize>, threshold: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
