use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside the accepted domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Network weights do not fit the layer arithmetic they are used with.
    #[error("weight error: {0}")]
    Weight(String),

    /// A file or in-memory container does not follow its declared layout.
    #[error("format error in {context}: {message}")]
    Format { context: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn weight(msg: impl Into<String>) -> Self {
        Error::Weight(msg.into())
    }

    pub(crate) fn format(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            context: context.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
