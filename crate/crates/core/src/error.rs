use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{value} is not {prime}-local")]
    NotLocal { value: String, prime: u64 },
    #[error("division by {value}, which is not a unit in Z_({prime})")]
    NonUnit { value: String, prime: u64 },
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(String, String),
    #[error("generator index {index} exceeds the truncation N = {limit}")]
    Truncation { index: usize, limit: usize },
    #[error("generator index {0} is outside the supported range 1..=3")]
    UnsupportedIndex(usize),
    #[error("not integral: {0}")]
    NotIntegral(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid category data: {0}")]
    Category(String),
    #[error("size bound exceeded: {0}")]
    Bound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
