use thiserror::Error;

use crate::sewing::IntegralResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate rectangle has no oriented boundary")]
    DegenerateRectangle,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no-convergence: Cauchy gap grew over 3 consecutive levels (last level {level}, gap {gap:e})")]
    NoConvergence { level: u32, gap: f64 },

    #[error("budget-exceeded: {what}")]
    BudgetExceeded {
        what: String,
        partial: Option<Box<IntegralResult>>,
    },

    #[error("unsupported wavelet order {0} (supported: 1..=10)")]
    UnsupportedOrder(u32),

    #[error("invalid wavelet pattern {pattern} for dimension {dim}")]
    InvalidPattern { pattern: u32, dim: usize },

    #[error("insufficient levels: {0}")]
    InsufficientLevels(String),

    #[error("coefficient normalization mismatch")]
    NormalizationMismatch,

    #[error("coefficient field not populated to level {0}")]
    NotPopulated(u32),

    #[error("grid resolution {have} insufficient, need at least {required}")]
    ResolutionInsufficient { have: u32, required: u32 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
