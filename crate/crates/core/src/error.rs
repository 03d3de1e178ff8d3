use thiserror::Error;

/// Errors raised by the engine. Every variant names a violated precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index vector {0:?} has more than one negative part")]
    MoreThanOneNegativePart(Vec<i64>),
    #[error("parts {0:?} do not form a strict partition")]
    NotStrict(Vec<i64>),
    #[error("series exponential requires a zero constant term")]
    NonzeroConstantTerm,
    #[error("pfaffian of a matrix with odd dimension {0}")]
    OddDimension(usize),
    #[error("odd variable index expected, got {0}")]
    InvalidOddIndex(i64),
    #[error("Virasoro index {0} is below -1")]
    IndexBelowMinusOne(i64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("odd-length input {0:?} contains a zero part; pass the zero-padded form explicitly")]
    OddLengthWithoutZeroPad(Vec<i64>),
    #[error("truncation degree {have} is too small, need at least {needed}")]
    TruncationInsufficient { needed: u32, have: u32 },
    #[error("linear system for the hbar^{order} slice is inconsistent")]
    InconsistentSystem { order: i64 },
    #[error("constraint c1*c2 = -hbar/16 violated")]
    ConstraintViolation,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
