use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation
    /// (negative LLR mean, probability outside (0, 1], ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structured input (topology, parity-check matrix, parameter set)
    /// violated one of its invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// A text input could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An iterative routine exhausted its budget without meeting its
    /// tolerance, or a root bracket could not be established.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// A bound was queried outside its validity regime (LLRs too small for
    /// the truncated-binomial argument to hold).
    #[error("bound not applicable: {0}")]
    BoundNotApplicable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn bound_not_applicable(msg: impl Into<String>) -> Self {
        Error::BoundNotApplicable(msg.into())
    }
}
