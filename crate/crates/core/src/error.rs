use thiserror::Error;

/// Errors produced by `hk-core`.
#[derive(Debug, Error)]
pub enum HkError {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("expected exactly 3 distinct non-constant terms, found {0}")]
    TermCount(usize),

    #[error("coefficient of term `{term}` vanishes mod {p}")]
    ZeroCoefficient { term: String, p: u32 },

    #[error("constant terms are not allowed")]
    ConstantTerm,

    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis of size {required} exceeds the budget of {budget} monomials")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HkError>;
