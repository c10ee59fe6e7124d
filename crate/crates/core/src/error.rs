use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown root system family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("vector does not lie in the flat (coordinates must sum to zero)")]
    NotInFlat,
    #[error("{0} is excluded: no local SL(3,R)/SO(3) factors are allowed")]
    ExcludedSpace(String),
    #[error("unknown space `{0}`")]
    UnknownSpace(String),
    #[error("empty frame")]
    EmptyFrame,
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("no matching: {0}")]
    NoMatching(String),
    #[error("basis is not orthonormal (gram deviation {0:e})")]
    NonOrthonormalBasis(f64),
    #[error("b does not lie in Q_v (deviation {0:e})")]
    BNotInQ(f64),
    #[error("epsilon {eps} exceeds 1/(rank+1)^2 = {limit}")]
    EpsilonTooLarge { eps: f64, limit: f64 },
    #[error("matching failed: {0}")]
    MatchFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
