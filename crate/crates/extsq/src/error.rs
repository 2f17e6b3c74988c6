use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },

    #[error("module error: {0}")]
    Module(String),

    #[error("map error: {0}")]
    Map(String),

    #[error("extension is not exact: {0}")]
    NotExact(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("corrupt checkpoint: {0}")]
    Checkpoint(String),

    #[error("unknown name: {0}")]
    Unknown(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
