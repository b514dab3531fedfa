use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),
    #[error("metrics undefined for a codebook with fewer than two codewords")]
    UndefinedMetrics,
    #[error("codebook has {size} codewords, decode budget is {budget}")]
    DecodeBudget { size: u128, budget: u128 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("codebook carries no dispersion matrices")]
    MissingDispersion,
    #[error("mismatched codebooks: {0}")]
    MismatchedCodebooks(String),
    #[error("need at least {needed} points with {min_errors}+ errors in the window, found {found}")]
    InsufficientErrors {
        needed: usize,
        min_errors: u64,
        found: usize,
    },
    #[error("unknown scheme: {0}")]
    UnknownScheme(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("empty codebook")]
    EmptyCodebook,
}

pub type Result<T> = std::result::Result<T, Error>;
