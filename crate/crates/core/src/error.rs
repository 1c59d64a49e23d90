use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid question: {0}")]
    InvalidQuestion(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("unknown key id {0}")]
    UnknownKey(u64),

    #[error("malformed ciphertext: {0}")]
    MalformedCiphertext(String),

    #[error("unsupported strategy: {0}")]
    UnsupportedStrategy(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
