use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("multiplier {index} is zero")]
    ZeroMultiplier { index: usize },
    #[error("invalid letter {0}: total degree must be at least 1")]
    InvalidLetter(String),
    #[error("moulds live on different truncation contexts")]
    ContextMismatch,
    #[error("mould is not invertible: its value on the empty word is 0")]
    NotInvertible,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("operators live on different truncated algebras")]
    SpaceMismatch,
    #[error("resonant: linearization mould undefined on word {0}")]
    SingularLinearization(String),
    #[error("no stationary limit after {iterations} sweeps\n{diagnostic}")]
    NotStationary {
        iterations: usize,
        diagnostic: String,
    },
    #[error("{path}:{line}: {reason}")]
    Spec {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
