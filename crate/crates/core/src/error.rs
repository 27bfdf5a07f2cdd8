use thiserror::Error;

/// Errors surfaced by scenario handling, the numeric kernel, and the solvers.
///
/// Branch indices in messages are 1-based, matching scenario files and
/// rendered reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("negative entry: {0}")]
    NegativeEntry(String),

    #[error("economy is not productive: leading principal minor {index} of (I - A) is {value:e}")]
    NonProductive { index: usize, value: f64 },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("zero matrix has no dominant eigenpair")]
    ZeroMatrix,

    #[error("branch {0} has zero output value")]
    ZeroOutputValue(usize),

    #[error("wage basket value {0} exceeds the value created by one hour of labor")]
    WageExceedsValue(f64),

    #[error("allocation requires non-positive capital in branch {branch} ({value:e}); the scenario admits no positive simple reproduction")]
    NegativeCapital { branch: usize, value: f64 },

    #[error("no sign change of z found while scanning up to q = {q_max}")]
    NoRoot { q_max: f64 },

    #[error("zero-surplus economy: the q-scan is degenerate, use the zero-surplus solver")]
    ZeroSurplus,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
