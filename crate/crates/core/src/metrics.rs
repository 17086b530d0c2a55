//! Detection rate and brute-force strength.

use crate::descriptor::Descriptor;
use crate::error::{Error, Result};

/// Fraction of positions where `original` and `extracted` agree.
pub fn cdr(original: &[bool], extracted: &[bool]) -> Result<f64> {
    if original.len() != extracted.len() {
        return Err(Error::LengthMismatch {
            expected: original.len(),
            found: extracted.len(),
        });
    }
    if original.is_empty() {
        return Err(Error::InvalidArgument("bit vectors must be non-empty"));
    }
    let agree = original
        .iter()
        .zip(extracted)
        .filter(|(a, b)| a == b)
        .count();
    Ok(agree as f64 / original.len() as f64)
}

/// Below this many code bits a blind guess is considered feasible.
pub const MIN_SECURE_BITS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SecurityEstimate {
    /// Independent code bits `N`.
    pub bits: u64,
    /// `log2` of the blind-guess space, `2^N`.
    pub log2_space: u64,
    pub weak: bool,
}

impl SecurityEstimate {
    pub fn from_bits(bits: u64) -> Self {
        SecurityEstimate {
            bits,
            log2_space: bits,
            weak: bits < MIN_SECURE_BITS,
        }
    }
}

/// Repetitions re-encode the same code bit, so they do not enlarge the space.
pub fn estimate_security(descriptor: &Descriptor) -> SecurityEstimate {
    SecurityEstimate::from_bits(descriptor.code_bits().len() as u64)
}
