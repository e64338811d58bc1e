use thiserror::Error;

/// Errors raised by the neurovariety library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} does not fit in 32 bits")]
    PrimeTooLarge(u64),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
    #[error("polynomial basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("activation exponent must be at least 1")]
    ZeroExponent,
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("output degree or ambient dimension overflows for {0}")]
    DegreeOverflow(String),
    #[error("ambient dimension {dim} of {arch} exceeds the cap {cap}")]
    AmbientTooLarge { arch: String, dim: u64, cap: u64 },
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("inconsistent facts for {arch}: lower bound {lower} exceeds upper bound {upper}")]
    InconsistentFacts { arch: String, lower: u64, upper: u64 },
    #[error("enumeration of {size} tuples exceeds the cap {cap}")]
    EnumerationTooLarge { size: u64, cap: u64 },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
