use std::io;
use std::path::PathBuf;

use revrank_core::error::ErrorClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] revrank_core::Error),
    #[error("output: {0}")]
    Output(#[from] io::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format { path: path.into(), message: message.into() }
    }

    /// Process exit status: 1 for I/O, 2 for configuration or usage, 3 for
    /// domain errors such as an attribute with no vector.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Output(_) | Error::Format { .. } => 1,
            Error::Config(_) => 2,
            Error::Core(e) => match e.class() {
                ErrorClass::Config => 2,
                ErrorClass::Parse => 1,
                ErrorClass::Domain => 3,
            },
        }
    }
}
