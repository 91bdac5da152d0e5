use thiserror::Error;

/// Errors raised by every operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("no generic ray direction found after {retries} attempts")]
    Genericity { retries: usize },

    #[error("oracle failure: {0}")]
    Oracle(String),

    /// A result that a proven theorem guarantees was not found. Always a bug.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("balanced component touches the analysis window boundary: {0}")]
    BoundaryContact(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_)
            | Error::Mismatch(_)
            | Error::Oracle(_)
            | Error::BoundaryContact(_)
            | Error::Json(_)
            | Error::Io(_) => 2,
            Error::Genericity { .. } | Error::Capacity(_) => 3,
            Error::TheoremViolation(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
