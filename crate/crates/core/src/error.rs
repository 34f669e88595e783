use thiserror::Error;

#[derive(Debug, Error)]
pub enum MwkError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid exponent {0}: must be finite and > 1")]
    InvalidExponent(f64),

    #[error("non-finite value {value} at {location}")]
    NonFinite { value: f64, location: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("malformed config name {0:?}, expected \"{{n}}x{{m}}-{{k}} +{{q}}NF\"")]
    ConfigName(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl MwkError {
    /// Short machine-parsable category, used by the CLI error line.
    pub fn category(&self) -> &'static str {
        match self {
            MwkError::DimensionMismatch { .. } => "dimension",
            MwkError::InvalidExponent(_) => "exponent",
            MwkError::NonFinite { .. } => "non_finite",
            MwkError::InvalidInput(_) => "input",
            MwkError::Parse { .. } | MwkError::ConfigName(_) | MwkError::Csv(_) => "parse",
            MwkError::Io(_) => "io",
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        MwkError::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, MwkError>;
