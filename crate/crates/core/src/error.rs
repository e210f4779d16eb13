use std::path::PathBuf;

use thiserror::Error;

/// Every failure the pipeline can surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("schema: {0}")]
    Schema(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("column `{0}` is constant and carries no information")]
    DegenerateColumn(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("segment detection: wanted {wanted} peaks, found {found}")]
    Detection { wanted: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("undefined rate: {0}")]
    UndefinedRate(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 config/usage, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 2,
            Error::Numerical(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
