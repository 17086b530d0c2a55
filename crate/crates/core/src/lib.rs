//! Keyed single-neuron block authentication for 8-bit images.
//!
//! An image is cut into `B x B` blocks. Each block is normalized to zero mean
//! and unit peak amplitude, fed through a threshold neuron whose weights come
//! from a keyed SplitMix64 stream, and a per-block bias is solved so that the
//! neuron emits a chosen code bit with activation exactly `+T` or `-T`.
//! The biases, code bits and parameters form a [`Descriptor`] that travels
//! separately from the (unmodified) image. Verification recomputes the bits;
//! any block whose content moved the activation across zero is flagged.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, codecs and the
//! command line live in the `blockauth` crate.

#![no_std]

extern crate alloc;

pub mod descriptor;
pub mod distort;
pub mod error;
pub mod metrics;
pub mod neuron;
pub mod pipeline;
pub mod prng;

pub use descriptor::{DecodeError, Descriptor};
pub use distort::add_gaussian_noise;
pub use error::{Error, Result};
pub use metrics::{cdr, estimate_security, SecurityEstimate};
pub use neuron::{
    compute_bias, extract_bit, normalize_block, sign_block, verify_block, Aggregation, BlockSecret,
    BlockVerdict, ExtractedBit, Margin, NormalizedBlock,
};
pub use pipeline::{
    partition, render_tamper_map, sign_image, verify_image, verify_image_with, BlockGrid,
    ChannelMode, CodeSource, ImageBuffer, SignConfig, VerificationReport, VerifyOptions,
};
pub use prng::{AuthKey, StreamState};
