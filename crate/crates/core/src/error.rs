use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("grid too small for stencil: need at least {needed} nodes along {axis}, have {have}")]
    GridTooSmall {
        axis: &'static str,
        needed: usize,
        have: usize,
    },

    #[error("valid window exhausted: {0}")]
    WindowExhausted(String),

    #[error("input function is identically zero")]
    ZeroFunction,

    #[error("sequence too short: need at least {needed} entries, got {got}")]
    SequenceTooShort { needed: usize, got: usize },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Stable machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::SeriesNonConvergence { .. } => "series_non_convergence",
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::WindowExhausted(_) => "window_exhausted",
            Error::ZeroFunction => "zero_function",
            Error::SequenceTooShort { .. } => "sequence_too_short",
            Error::Overflow(_) => "overflow",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    /// The offending configuration field, when the error names one.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::InvalidParameter { field, .. } => Some(field),
            _ => None,
        }
    }
}
