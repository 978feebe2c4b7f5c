use thiserror::Error;

/// Errors raised by the arithmetic, enumeration and verification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("prime {0} is not an odd prime")]
    BadPrime(u64),
    #[error("precision p^{n} with p = {p} does not fit in 62 bits")]
    PrecisionTooLarge { p: u64, n: u32 },
    #[error("operands use different primes or precisions ({0} vs {1})")]
    Mismatch(String, String),
    #[error("precision {have} is below the required {need}")]
    InsufficientPrecision { have: u32, need: u32 },
    #[error("{k} is not invertible modulo powers of {p}")]
    NotInvertible { k: i128, p: u64 },
    #[error("lambda_p is undefined at zero")]
    ZeroArgument,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction {0} leaves the generating stratum or is not supported for this group")]
    NonGeneratorDirection(String),
    #[error("group {group} needs p >= {min_prime}, got p = {p}")]
    PrimeTooSmall { group: String, min_prime: u64, p: u64 },
    #[error("label {0} is not in the unitary dual")]
    NotInDual(String),
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("resource cap exceeded: {what} needs {need}, cap is {cap}")]
    ResourceCap { what: String, need: u128, cap: u128 },
    #[error("closed-form spectrum is not available: {0}")]
    UnsupportedLaw(String),
    #[error("incomplete coefficient set: {0}")]
    IncompleteCoefficients(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("unknown group id {0:?}")]
    UnknownGroup(String),
}

pub type Result<T> = std::result::Result<T, Error>;
