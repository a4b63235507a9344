use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid prime set: {0}")]
    InvalidPrimes(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("value at index {0} is unset")]
    UnsetValue(u64),

    #[error("invalid seeds: {0}")]
    InvalidSeeds(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("horizon too small: {0}")]
    Horizon(String),

    // The four predetermined values of a six-block can never all agree; if
    // they do, the inductive invariant was broken earlier.
    #[error("impossible six-block configuration at block {0}")]
    CaseFiveViolation(u64),

    #[error("conflicting assignments for index {0}")]
    RelationConflict(u64),

    #[error("free/fixed counting failed in block {0}: {1}")]
    CountingFailure(u64, String),

    #[error("free surplus too small in block {0}: {1}")]
    SurplusFailure(u64, String),

    #[error("unresolvable dependency cycle through index {0}")]
    DependencyCycle(u64),

    #[error("restricted-sum decomposition mismatch at x = {0}")]
    DecompositionMismatch(u64),

    #[error("invalid character table: {0}")]
    InvalidCharacter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
