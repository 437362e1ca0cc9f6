use thiserror::Error;

/// Every failure the library reports.
///
/// Variants are grouped by how the command-line front end classifies them:
/// domain failures (a well-posed question without an answer), numeric
/// failures (an answer exists but was not reached), and input problems.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MopError {
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("multi-index {0} is not normal")]
    NonNormalIndex(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("solution is not unique: {0}")]
    NonUnique(String),
    #[error("recurrence fit failed: {0}")]
    NoFit(String),
    #[error("moment table exhausted: index {index} requested, {len} entries available")]
    TableExhausted { index: usize, len: usize },
    #[error("operation unsupported for moment tables")]
    UnsupportedForTable,
    #[error("point outside the support: {0}")]
    DomainError(String),

    #[error("system remained ill-conditioned up to {precision} bits")]
    IllConditioned { precision: u32 },
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("series Newton iteration diverged: {0}")]
    NewtonDivergence(String),
    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),
    #[error("insufficient series terms: {0}")]
    InsufficientTerms(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl MopError {
    /// Failures caused by the mathematics of the request rather than by
    /// numerics or malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            MopError::SingularSystem(_)
                | MopError::NonNormalIndex(_)
                | MopError::NoSolution(_)
                | MopError::NonUnique(_)
                | MopError::NoFit(_)
                | MopError::TableExhausted { .. }
                | MopError::UnsupportedForTable
                | MopError::DomainError(_)
        )
    }

    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            MopError::IllConditioned { .. }
                | MopError::NonConvergence(_)
                | MopError::NewtonDivergence(_)
                | MopError::BranchAmbiguity(_)
                | MopError::InsufficientTerms(_)
        )
    }
}

impl From<std::io::Error> for MopError {
    fn from(e: std::io::Error) -> Self {
        MopError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for MopError {
    fn from(e: serde_json::Error) -> Self {
        MopError::Parse(e.to_string())
    }
}

pub type Result<T, E = MopError> = std::result::Result<T, E>;
