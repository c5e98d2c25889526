use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Domain errors are precondition violations on user input. Internal errors
/// signal a broken invariant and map to a different CLI exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("zero input where a unit of F^x or K^x is required")]
    ZeroInput,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("invalid character data: {0}")]
    InvalidCharacter(String),
    #[error("conductor {0} exceeds the supported bound 3")]
    ConductorTooLarge(u32),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("undecidable at precision {0}: {1}")]
    Undecidable(u32, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("scenario error at `{field}`: {message}")]
    Scenario { field: String, message: String },
    #[error("epsilon value {re:.12}+{im:.12}i is not within tolerance of +1 or -1")]
    SignSnap { re: f64, im: f64 },
    #[error("rewrite search exhausted: {0}")]
    RewriteExhausted(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures that indicate a bug or an inconsistent convention
    /// rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::SignSnap { .. } | Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
