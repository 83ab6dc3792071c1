use thiserror::Error;

/// Errors raised by the q-calculus routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of the q-Gamma function at {0}")]
    Pole(f64),
    #[error("no convergence after {terms} terms (last term magnitude {est_error:e})")]
    NonConvergence { terms: usize, est_error: f64 },
    #[error("series diverges: terms grew for {run} consecutive steps up to term {terms}")]
    Divergence { terms: usize, run: usize },
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
}

impl QError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QError::Domain(msg.into())
    }
}

pub type Result<T, E = QError> = std::result::Result<T, E>;
