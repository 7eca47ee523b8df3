use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("d^2 != 0 in degree {0}")]
    NotDifferential(i32),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("not a nullhomotopy: {0}")]
    NotNullhomotopy(String),
    #[error("map is not degreewise injective: {0}")]
    NotInjective(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("diagram does not commute: {0}")]
    NotCommutative(String),
    #[error("cocone legs are inconsistent: {0}")]
    BadCocone(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("cube dimension {0} exceeds the cap {1}")]
    CubeCap(usize, usize),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
