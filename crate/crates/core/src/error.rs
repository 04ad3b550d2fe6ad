use thiserror::Error;

/// Errors raised by the model, integrators, analysis and I/O layers.
#[derive(Debug, Error)]
pub enum DyadicError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("operation requires the plateau tail convention")]
    UnsupportedConvention,

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("step size underflow at t = {t} (dt = {dt})")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("non-finite state produced at t = {t}")]
    Escape { t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DyadicError>;
