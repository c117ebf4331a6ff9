use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("support of test function exceeds quadrature box: {0}")]
    SupportExceedsGrid(String),

    #[error("linear solver failed after {iterations} iterations (last residual {last_residual:.3e})")]
    Solver {
        iterations: usize,
        last_residual: f64,
        history: Vec<f64>,
    },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
