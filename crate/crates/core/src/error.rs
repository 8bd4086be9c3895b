use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("partial-quotient stream exhausted: needed {needed} terms, {available} available")]
    StreamExhausted { needed: usize, available: usize },

    #[error("precision exhausted at x0 = {x0} (max depth {max_depth})")]
    PrecisionExhausted { x0: u64, max_depth: usize },

    #[error("invalid depth {0}: continued-fraction enclosures need depth >= 2")]
    InvalidDepth(usize),

    #[error("X = {x} is beyond the computed horizon {horizon}")]
    HorizonExceeded { x: String, horizon: u64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("vectors are linearly dependent")]
    DependentVectors,

    #[error("vector must have at least 2 coordinates, got {0}")]
    Dimension(usize),

    #[error("polynomial has total degree {0}, expected 2")]
    BadDegree(usize),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("lambda = {0} must exceed 1/2")]
    BadLambda(String),

    #[error("theta = {theta} must exceed (1 - lambda)/(2 lambda - 1) = {critical}")]
    ThetaTooSmall { theta: String, critical: String },

    #[error("delta enclosure of point {index} contains zero")]
    DegenerateDelta { index: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid letters: {0}")]
    InvalidLetters(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty report: add at least one section")]
    EmptyReport,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
