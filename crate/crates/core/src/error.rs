use thiserror::Error;

/// Errors raised by the library. Sampler failures that are part of an
/// algorithm's contract (an honest refusal, a failed smoothness test) are
/// reported through outcome types, not through this enum.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("basis vectors are linearly dependent")]
    DependentRows,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rank {rank} exceeds the limit of {limit} for {op}")]
    RankTooHigh { op: &'static str, rank: usize, limit: usize },
    #[error("not a sublattice: {0}")]
    NotSublattice(String),
    #[error("quotient index {index} exceeds the limit of {limit}")]
    IndexTooLarge { index: u128, limit: u128 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration support exceeds {0} points")]
    SupportTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
