use std::io;
use std::path::PathBuf;

use blockauth_core::DecodeError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Auth(#[from] blockauth_core::Error),

    #[error("descriptor: {0}")]
    Descriptor(#[from] DecodeError),

    #[error("pnm: {0}")]
    Pnm(String),

    #[error("codec: {0}")]
    Codec(#[from] image::ImageError),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("report: {0}")]
    Report(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
