use thiserror::Error;

/// Errors raised by the herding toolkit.
#[derive(Debug, Error)]
pub enum HerdError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("state space of {states} configurations exceeds the exhaustive-search cap of {cap}")]
    CapExceeded { states: u128, cap: u128 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("variant {variant} is not usable here: {reason}")]
    IncompatibleVariant {
        variant: &'static str,
        reason: String,
    },

    #[error("classification needs at least two classes, found {0}")]
    DegenerateLabels(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HerdError>;

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(HerdError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
