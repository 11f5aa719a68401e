use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid epsilon {0:?}: must be a decimal in [0, 1/4)")]
    InvalidEpsilon(String),
    #[error("cookies_per_site must be at least 1")]
    NoCookies,
    #[error("requested {requested} steps, budget allows {budget}")]
    Capacity { requested: u64, budget: u64 },
    #[error("coupled walk requires the fresh-drift variant")]
    Variant,
    #[error("index error: {0}")]
    Index(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("nonpositive value {value} at point {index}")]
    NonPositive { index: usize, value: f64 },
}

pub type Result<T, E = WalkError> = std::result::Result<T, E>;
