use thiserror::Error;

#[derive(Debug, Error)]
pub enum KzError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("coincident points: {0}")]
    CoincidentPoints(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subspace not invariant: residual {residual:e} exceeds {tolerance:e} for {what}")]
    InvarianceViolation {
        what: String,
        residual: f64,
        tolerance: f64,
    },
    #[error("path construction failed: {0}")]
    PathConstruction(String),
    #[error("integrator step underflow at s = {s}: {detail}")]
    StepUnderflow { s: f64, detail: String },
    #[error("quadrature setup rejected: {0}")]
    Quadrature(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KzError>;
