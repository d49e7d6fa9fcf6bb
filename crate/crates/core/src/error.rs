use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("time ranges do not overlap")]
    NoOverlap,

    #[error("signal of length {0} is too short for a decomposition step")]
    SignalTooShort(usize),

    #[error("{levels} decomposition levels is not feasible for a signal of length {length}")]
    TooManyLevels { levels: usize, length: usize },

    #[error("inconsistent coefficient pyramid: {0}")]
    InconsistentPyramid(String),

    #[error("missing channel `{0}`")]
    MissingChannel(String),

    #[error("undefined MAPE: truth value {value} at index {index} is too close to zero")]
    UndefinedMape { index: usize, value: f64 },

    #[error("windy minute at t={timestamp} has no short-term forecast coverage")]
    CoverageGap { timestamp: i64 },

    #[error("unsupported document version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("ingestion error: {0}")]
    Ingestion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
