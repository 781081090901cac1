use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error category, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A configuration file is missing or malformed.
    Config,
    /// Caller-supplied data is unusable.
    Input,
    /// A computed value broke an invariant the code relies on.
    Invariant,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("model error: {0}")]
    Model(String),

    #[error("invalid pattern {pattern:?} in [{section}]: {source}")]
    Pattern {
        section: String,
        pattern: String,
        #[source]
        source: regex::Error,
    },

    #[error("invalid performance: {0}")]
    Performance(String),

    #[error("invalid distribution table: {0}")]
    Table(String),

    #[error("{0}")]
    EmptyInput(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("undefined: {0}")]
    Undefined(&'static str),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Model(_)
            | Error::Pattern { .. }
            | Error::Performance(_)
            | Error::Table(_) => ErrorKind::Config,
            Error::EmptyInput(_)
            | Error::Parse { .. }
            | Error::InvalidArgument(_)
            | Error::Undefined(_) => ErrorKind::Input,
            Error::Invariant(_) => ErrorKind::Invariant,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
