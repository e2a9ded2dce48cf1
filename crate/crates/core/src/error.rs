use thiserror::Error;

/// Errors raised by the arithmetic, sequence and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("Lucas parameter Q must be nonzero")]
    ZeroQ,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("prime {0} divides Q and has no rank of appearance")]
    NoRank(u64),
    #[error("rank of {prime} is {rho}, not maximal (expected {expected})")]
    NonMaximalRank { prime: u64, rho: u64, expected: u64 },
    #[error("Lucanomial ({m} choose {n}) has a non-integral quotient")]
    InternalNonIntegral { m: u64, n: u64 },
    #[error("Lucanomial ({m} choose {n}) has more zero factors below than above")]
    ConventionViolation { m: u64, n: u64 },
    #[error("modulus {prime}^{exponent} does not fit in 64 bits")]
    PrecisionOverflow { prime: u64, exponent: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
