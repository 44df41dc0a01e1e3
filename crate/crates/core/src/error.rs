use thiserror::Error;

use crate::raimi_circle::RotationTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed rational {0:?}; expected \"p/q\" or \"p\" with q > 0")]
    MalformedRational(String),

    #[error("degenerate arc [{lo}, {hi}): endpoints coincide mod 1")]
    DegenerateArc { lo: String, hi: String },

    #[error("invalid coordinate range [{lo}, {hi}); need 0 <= lo < hi <= 1")]
    InvalidRange { lo: String, hi: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("k = {k} is below the admissible threshold {min} for r = {r}, t = {t}")]
    ThresholdTooSmall { r: u32, t: u32, k: u64, min: u64 },

    #[error("not a cover: union has measure {measure}; uncovered region {gap}")]
    NotACover { measure: String, gap: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cover violation at x in {cell}: no part has slice measure >= 1/t")]
    CoverViolation { cell: String },

    #[error("certificate does not match the instance: {0}")]
    StructuralMismatch(String),

    #[error("oracle candidate limit exceeded: {count} > {limit}")]
    CandidateLimit { count: usize, limit: usize },

    #[error("malformed document: {0}")]
    Parse(String),

    #[error("internal invariant violated: {message}")]
    Invariant {
        message: String,
        trace: Option<Box<RotationTrace>>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invariant(message: impl Into<String>) -> Self {
        Error::Invariant {
            message: message.into(),
            trace: None,
        }
    }

    /// True for failures that indicate a bug in this crate rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
