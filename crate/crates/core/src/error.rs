use thiserror::Error;

/// Errors raised by the estimators, the inference routines and the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("series of length {n} is too short for model order {k}")]
    TooShort { n: usize, k: usize },

    #[error("model order must be at least 1")]
    ZeroOrder,

    #[error("empty series")]
    Empty,

    #[error("alphabet size must be at least {min}, got {got}")]
    AlphabetTooSmall { got: usize, min: usize },

    #[error("symbol {value} at index {index} is outside alphabet of size {alphabet}")]
    SymbolOutOfRange {
        index: usize,
        value: usize,
        alphabet: usize,
    },

    #[error("history encoding overflows: alphabet {alphabet}^{k} cells")]
    EncodingOverflow { alphabet: usize, k: usize },

    #[error("vector at index {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("regressor matrix is rank deficient (collinear lags)")]
    RankDeficient,

    #[error("residual covariance is degenerate (generalized variance {0:e})")]
    DegenerateVariance(f64),

    #[error("full and null fits are inconsistent: negative estimate {0:e}")]
    InconsistentFit(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("chain is not ergodic: {0}")]
    NonErgodic(String),

    #[error("state space of {cells} cells exceeds the enumeration budget of {budget}")]
    BudgetExceeded { cells: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
