use core::result;

/// Errors raised by signing, verification and the numeric primitives.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("image {width}x{height} is smaller than one {block_size}x{block_size} block")]
    ImageTooSmall {
        width: usize,
        height: usize,
        block_size: usize,
    },

    #[error("code bitmap holds {found} bits but the block grid needs {expected}")]
    CodeSizeMismatch { expected: usize, found: usize },

    #[error(
        "descriptor geometry {expected:?} (width, height, channels) does not match image {found:?}"
    )]
    GeometryMismatch {
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },

    /// The key does not belong to the descriptor. Distinct from tampering.
    #[error("key fingerprint {found:016x} does not match descriptor fingerprint {expected:016x}")]
    FingerprintMismatch { expected: u64, found: u64 },
}

pub type Result<T> = result::Result<T, Error>;
