use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be odd")]
    EvenModulus,
    #[error("modulus {0} exceeds 2^31 - 1")]
    ModulusOutOfRange(u64),
    #[error("simplex shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("64-bit counter overflow while computing {0}")]
    Overflow(&'static str),
    #[error("malformed set spec {spec:?}: {reason}")]
    SetSpec { spec: String, reason: String },
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
