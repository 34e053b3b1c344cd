use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} outcomes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("state {label}: ket is not normalized (norm residual {residual:.3e})")]
    NotNormalized { label: usize, residual: f64 },

    #[error("states ({i}, {j}) are not orthogonal (overlap residual {residual:.3e})")]
    NotOrthogonal { i: usize, j: usize, residual: f64 },

    #[error("labels must be 1..={n} in order; found {found} at position {position}")]
    BadLabel { n: usize, position: usize, found: usize },

    #[error("angle {name} = {value} outside the open interval (0, pi/2)")]
    InvalidAngle { name: &'static str, value: f64 },

    #[error("{what} = {value} out of range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("Kraus operators are not complete (residual {residual:.3e})")]
    Incomplete { residual: f64 },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("random Kraus draw stayed singular after {retries} retries")]
    DegenerateDraw { retries: u32 },

    #[error("priors must be nonnegative and sum to 1 (got {q1}, {q2})")]
    InvalidPriors { q1: f64, q2: f64 },

    #[error("no guess assigned for Alice outcome {outcome}, Bob outcome {bob_outcome}")]
    IncompleteGuessMap { outcome: usize, bob_outcome: usize },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("first-round progress is possible; no forced structure")]
    ProgressPossible,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
