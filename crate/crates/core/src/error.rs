use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero direction vector at cell ({i}, {j})")]
    ZeroVector { i: usize, j: usize },

    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("negative update coefficient {value:e} at cell ({i}, {j}); time step violates the CFL bound")]
    CflViolation { i: usize, j: usize, value: f64 },

    #[error("non-finite value at step {step} (t = {t:e}): {detail}")]
    NonFinite { step: usize, t: f64, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no convergence after {iterations} iterations (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },

    #[error("density support reaches the boundary of the working interval [{lo}, {hi}]")]
    SupportAtBoundary { lo: f64, hi: f64 },

    #[error("power iteration stagnated after {iterations} iterations")]
    Stagnation { iterations: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
