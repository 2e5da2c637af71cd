use thiserror::Error;

/// Errors raised by parsing, validation, and enumeration entry points.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("multiset must contain at least one value")]
    EmptyMultiset,
    #[error("invalid multiplicity `{0}`: expected a positive integer")]
    InvalidMultiplicity(String),
    #[error("word is empty")]
    EmptyWord,
    #[error("invalid word token `{0}`")]
    InvalidWordToken(String),
    #[error("word does not match the multiset: {0}")]
    WordMismatch(String),
    #[error("word contains a crossing abab pattern")]
    NotQuasiStirling,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid block tree: {0}")]
    InvalidBlockTree(String),
    #[error("invalid code pair: {0}")]
    InvalidCodePair(String),
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
    #[error("total multiplicity {total} exceeds the enumeration cap {cap}")]
    SizeCap { total: u32, cap: u32 },
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("coefficient of t^{0} is negative")]
    NegativeCoefficient(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
