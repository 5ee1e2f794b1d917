use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// No eigenvalue gap of the bias-removed covariance passes the threshold.
    #[error("no eigenvalue gap reaches tau * lambda_1 (tau = {tau})")]
    NoGap { tau: f64, spectrum: Vec<f64> },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("span exhausted after {selected} of {requested} selections")]
    SpanExhausted { selected: usize, requested: usize },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
