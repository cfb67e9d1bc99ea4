use thiserror::Error;

/// Errors raised by the flows, decompositions and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("ill-conditioned input: {0}")]
    Conditioning(String),

    /// A point sits inside the band where its cell cannot be decided.
    #[error("ambiguous classification: {0}")]
    Ambiguous(String),

    #[error("indeterminate numerical rank: {0}")]
    Indeterminate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),
}

impl Error {
    /// True for failures caused by the numbers rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular(_)
                | Error::Conditioning(_)
                | Error::Ambiguous(_)
                | Error::Indeterminate(_)
                | Error::NoConvergence(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
