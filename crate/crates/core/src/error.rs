use thiserror::Error;

/// Errors raised by the exact arithmetic, samplers, and experiment layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("precision exhausted at {precision} p-adic digits")]
    PrecisionExhausted { precision: u32 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("denominator of {0} is divisible by p")]
    DenominatorNotInvertible(String),

    #[error("parts are not non-increasing: {0:?}")]
    InvalidSignature(Vec<i64>),

    #[error("{mu:?} does not interlace {lambda:?}")]
    NotInterlacing { lambda: Vec<i64>, mu: Vec<i64> },

    #[error("point {index} is zero but carries negative weight")]
    ZeroPointWithNegativeWeight { index: usize },

    #[error("evaluation points must be pairwise distinct")]
    RepeatedPoints,

    #[error("Cauchy kernel has a pole (a_i * b_j = 1)")]
    KernelPole,

    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("corner inequality violated: {0}")]
    InequalityViolated(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

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

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
