//! The threshold neuron: block normalization, bias solving and bit
//! extraction, plus the repeated-bit variant used for tamper sensitivity.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::prng::{derive_block_seed, fill_weights, AuthKey};

/// Block samples with the mean removed and the peak magnitude scaled to 1.
///
/// A constant block normalizes to all zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedBlock(Vec<f64>);

impl NormalizedBlock {
    /// `p_j = (x_j - mean) / max_k |x_k - mean|`, or 0 for a flat block.
    ///
    /// Evaluated as `(n x_j - sum) / max_k |n x_k - sum|` on exact integers,
    /// so adding a constant to every pixel leaves the result bit-identical.
    pub fn from_pixels(pixels: &[u8]) -> Result<Self> {
        if pixels.is_empty() {
            return Err(Error::InvalidArgument(
                "block must contain at least one pixel",
            ));
        }
        let n = pixels.len() as i64;
        let sum: i64 = pixels.iter().map(|&x| x as i64).sum();
        let amplitude = pixels
            .iter()
            .map(|&x| (n * x as i64 - sum).abs())
            .max()
            .unwrap_or(0);
        let values = if amplitude == 0 {
            alloc::vec![0.0; pixels.len()]
        } else {
            let a = amplitude as f64;
            pixels
                .iter()
                .map(|&x| (n * x as i64 - sum) as f64 / a)
                .collect()
        };
        Ok(NormalizedBlock(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_flat(&self) -> bool {
        self.0.iter().all(|&p| p == 0.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for NormalizedBlock {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub fn normalize_block(pixels: &[u8]) -> Result<NormalizedBlock> {
    NormalizedBlock::from_pixels(pixels)
}

/// Activation margin `T` in `[0, 0.5]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Margin(f64);

impl Margin {
    pub const MAX: f64 = 0.5;
    pub const DEFAULT: Margin = Margin(0.2);

    pub fn new(t: f64) -> Result<Self> {
        if (0.0..=Self::MAX).contains(&t) {
            Ok(Margin(t))
        } else {
            Err(Error::InvalidArgument("margin must lie in [0, 0.5]"))
        }
    }

    pub const fn value(self) -> f64 {
        self.0
    }
}

impl Default for Margin {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Per-block secret: one bias per repetition and the code bit they encode.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSecret {
    pub biases: Vec<f64>,
    pub code_bit: bool,
}

/// Output of the neuron on a (possibly altered) block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractedBit {
    pub bit: bool,
    /// Pre-threshold sum `sum_j w_j p_j + b`.
    pub activation: f64,
}

fn check_len(p: &[f64], w: &[f64]) -> Result<()> {
    if p.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: w.len(),
        });
    }
    Ok(())
}

/// Left-to-right `sum_j w_j p_j`. Signing and verification share this so the
/// summation order is identical on both sides.
#[inline]
pub fn weighted_sum(p: &[f64], w: &[f64]) -> f64 {
    p.iter().zip(w).fold(0.0, |acc, (&p, &w)| acc + w * p)
}

/// Bias that places the activation of `p` at `+T` (bit 1) or `-T` (bit 0).
pub fn compute_bias(p: &[f64], w: &[f64], bit: bool, margin: Margin) -> Result<f64> {
    check_len(p, w)?;
    let target = if bit { margin.0 } else { -margin.0 };
    Ok(target - weighted_sum(p, w))
}

/// Thresholds `sum_j w_j p_j + b`; an activation of exactly 0 reads as bit 0.
pub fn extract_bit(p: &[f64], w: &[f64], bias: f64) -> Result<ExtractedBit> {
    check_len(p, w)?;
    if !bias.is_finite() {
        return Err(Error::InvalidArgument("bias must be finite"));
    }
    let activation = weighted_sum(p, w) + bias;
    Ok(ExtractedBit {
        bit: activation > 0.0,
        activation,
    })
}

/// How repeated bits of one block combine into a verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Aggregation {
    /// Any wrong repetition flags the block.
    #[default]
    Any,
    /// The block passes when a strict majority of repetitions are right.
    Majority,
}

impl Aggregation {
    pub fn accepts(self, correct: usize, reps: usize) -> bool {
        match self {
            Aggregation::Any => correct == reps,
            Aggregation::Majority => 2 * correct > reps,
        }
    }
}

/// Extracted bits of one block and whether it passed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockVerdict {
    pub bits: Vec<bool>,
    pub matched: bool,
}

/// Signs one block with `reps` independent weight vectors.
pub fn sign_block(
    pixels: &[u8],
    key: AuthKey,
    channel: usize,
    block_index: usize,
    code_bit: bool,
    margin: Margin,
    reps: usize,
) -> Result<BlockSecret> {
    if reps == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1"));
    }
    let p = NormalizedBlock::from_pixels(pixels)?;
    let mut w = alloc::vec![0.0; p.len()];
    let biases = (0..reps)
        .map(|r| {
            fill_weights(derive_block_seed(key, channel, block_index, r), &mut w);
            compute_bias(&p, &w, code_bit, margin)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockSecret { biases, code_bit })
}

/// Re-extracts every repetition of one block and compares with the code bit.
pub fn verify_block(
    pixels: &[u8],
    key: AuthKey,
    channel: usize,
    block_index: usize,
    secret: &BlockSecret,
    aggregation: Aggregation,
) -> Result<BlockVerdict> {
    if secret.biases.is_empty() {
        return Err(Error::InvalidArgument("repetitions must be at least 1"));
    }
    let p = NormalizedBlock::from_pixels(pixels)?;
    let mut w = alloc::vec![0.0; p.len()];
    let bits = secret
        .biases
        .iter()
        .enumerate()
        .map(|(r, &b)| {
            fill_weights(derive_block_seed(key, channel, block_index, r), &mut w);
            extract_bit(&p, &w, b).map(|e| e.bit)
        })
        .collect::<Result<Vec<_>>>()?;
    let correct = bits.iter().filter(|&&b| b == secret.code_bit).count();
    Ok(BlockVerdict {
        matched: aggregation.accepts(correct, bits.len()),
        bits,
    })
}
