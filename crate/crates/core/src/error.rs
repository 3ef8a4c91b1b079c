use thiserror::Error;

/// Errors raised by the scalar, matrix and operator checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The instance collapses (zero-length interval, zero denominator).
    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("dimension mismatch: expected order {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An operator instance failed its Loewner-order hypotheses.
    #[error("rejected instance: {0}")]
    RejectedInstance(String),

    #[error("sampling failed after {tries} tries: {what}")]
    SamplingFailure { what: String, tries: usize },

    #[error("parse error: {0}")]
    Parse(String),

    /// The operation does not apply to the given function (e.g. a convexity requirement).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("unknown claim `{0}`")]
    UnknownClaim(String),

    #[error("unknown relaxation `{relaxation}` for claim `{claim}`")]
    UnknownRelaxation { claim: String, relaxation: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
