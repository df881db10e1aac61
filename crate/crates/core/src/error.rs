use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("table length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid character {ch:?} at position {pos}; expected one of 0, 1, *")]
    InvalidCharacter { ch: char, pos: usize },
    #[error("input {0} is listed as both a zero and a one")]
    ConflictingAssignment(String),
    #[error("input strings have unequal lengths ({0} and {1})")]
    UnequalLengths(usize, usize),
    #[error("malformed function text: {0}")]
    Malformed(String),
    #[error("n = {n} is outside the supported range {min}..={max}")]
    UnsupportedSize { n: usize, min: usize, max: usize },
    #[error("function is undefined everywhere")]
    EmptyDomain,
    #[error("function is constant on its domain")]
    ConstantFunction,
    #[error("input {0} is not in the domain of the function")]
    OutsideDomain(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("degree bound m = {m} exceeds n = {n}")]
    DegreeTooLarge { m: usize, n: usize },
    #[error("no inputs with f(x) = {0}")]
    EmptyColumnSet(u8),
    #[error("base points are not linearly independent")]
    DependentPoints,
    #[error("witness does not satisfy the constraint system")]
    InvalidWitness,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("theorem check failed: {0}")]
    TheoremViolation(String),
    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
