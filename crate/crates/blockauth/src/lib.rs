//! File formats, JPEG round-trips, robustness sweeps and the `blockauth`
//! command line on top of [`blockauth_core`].

pub mod bench;
pub mod codec;
pub mod error;
pub mod keys;
pub mod pnm;
pub mod report;

pub use blockauth_core as core;
pub use error::{Error, Result};
