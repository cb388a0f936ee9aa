use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution parameter lies outside its admissible range.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// A series or truncation did not reach its tolerance within the term cap.
    #[error("no convergence within {cap} terms: {what}")]
    Convergence { what: String, cap: usize },

    /// A sequence entry violates the positivity (or length) requirement.
    #[error("invalid sequence: {0}")]
    Domain(String),

    /// An operation was called outside its documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A truncated mass function violates its invariants.
    #[error("invalid truncated pmf: {0}")]
    InvalidPmf(String),

    /// Text form of a distribution could not be parsed.
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    /// Certified verdicts contradict the implication chain between orders.
    #[error("internal consistency violated: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
