use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error(
        "lambda = {lambda} is not completely positive for d = {d}; admissible interval is [{lo:.6}, {hi}]"
    )]
    CpViolation {
        d: usize,
        lambda: f64,
        lo: f64,
        hi: f64,
    },

    #[error("branch {branch}: {source}")]
    Branch {
        branch: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("Kraus operators are not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("index {index} out of range for period {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
