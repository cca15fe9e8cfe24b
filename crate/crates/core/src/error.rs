use thiserror::Error;

/// Errors raised by the library. Inconclusive outcomes are values, not errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("constant polynomial where degree >= 1 is required")]
    ConstantPolynomial,
    #[error("2-adic valuation of zero is infinite")]
    ZeroValuation,
    #[error("polynomial is not square-free")]
    NotSquarefree,
    #[error("polynomial is not strictly positive on the real line")]
    NotPositive,
    #[error("polynomial is nonnegative but has real roots; strict positivity is required")]
    RealRoots,
    #[error("{0} is not a square in Q_2")]
    NotTwoAdicSquare(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("witness does not reproduce the polynomial: {0}")]
    WitnessMismatch(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("residue factors are not coprime over F_2")]
    NotCoprime,
    #[error("Newton root conditions fail: {0}")]
    NewtonConditions(String),
}

pub type Result<T> = std::result::Result<T, Error>;
