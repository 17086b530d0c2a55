//! The descriptor: everything a verifier needs besides the key and image.
//!
//! Byte layout, version 1, all integers little-endian:
//!
//! | offset | size | field                                      |
//! |--------|------|--------------------------------------------|
//! | 0      | 4    | magic `NNAC`                               |
//! | 4      | 2    | version (`1`)                              |
//! | 6      | 1    | channel mode (0 per-channel, 1 luma)       |
//! | 7      | 1    | image channels (1 or 3)                    |
//! | 8      | 4    | image width                                |
//! | 12     | 4    | image height                               |
//! | 16     | 4    | block size `B`                             |
//! | 20     | 4    | repetitions `R`                            |
//! | 24     | 8    | margin `T` (IEEE-754 binary64)             |
//! | 32     | 8    | key fingerprint                            |
//! | 40     | ⌈N/8⌉ | code bits, MSB first, zero padded         |
//! | ...    | 8·N·R | biases (binary64), block order then repetition |
//!
//! `N = channels_effective * rows * cols`. Nothing may follow the biases.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::neuron::{BlockSecret, Margin};
use crate::pipeline::{BlockGrid, ChannelMode};

pub const MAGIC: [u8; 4] = *b"NNAC";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 40;

/// Fixed-size parameters of a descriptor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Layout {
    pub width: u32,
    pub height: u32,
    /// Channels of the signed image, before the channel mode is applied.
    pub channels: u8,
    pub mode: ChannelMode,
    pub block_size: u32,
    pub margin: Margin,
    pub reps: u32,
    pub fingerprint: u64,
}

impl Layout {
    pub fn effective_channels(&self) -> usize {
        self.mode.effective_channels(self.channels as usize)
    }

    pub fn grid(&self) -> Result<BlockGrid> {
        BlockGrid::new(
            self.width as usize,
            self.height as usize,
            self.block_size as usize,
        )
    }

    /// `(code bits, biases)`, or `None` on overflow.
    fn counts(&self) -> Option<(u64, u64)> {
        let rows = u64::from(self.height) / u64::from(self.block_size);
        let cols = u64::from(self.width) / u64::from(self.block_size);
        let bits = rows
            .checked_mul(cols)?
            .checked_mul(self.effective_channels() as u64)?;
        Some((bits, bits.checked_mul(u64::from(self.reps))?))
    }

    fn validate(&self) -> core::result::Result<(u64, u64), &'static str> {
        if self.channels != 1 && self.channels != 3 {
            return Err("channel count must be 1 or 3");
        }
        if self.block_size < 2 {
            return Err("block size must be at least 2");
        }
        if self.width < self.block_size || self.height < self.block_size {
            return Err("image is smaller than one block");
        }
        if self.reps == 0 {
            return Err("repetitions must be at least 1");
        }
        Margin::new(self.margin.value()).map_err(|_| "margin must lie in [0, 0.5]")?;
        self.counts().ok_or("block counts overflow")
    }
}

/// Validated descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct Descriptor {
    layout: Layout,
    code_bits: Vec<bool>,
    biases: Vec<f64>,
}

/// Why a byte string is not a valid descriptor.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),

    #[error("unsupported descriptor version {0}")]
    UnsupportedVersion(u16),

    #[error("truncated payload: need {needed} bytes, have {available}")]
    TruncatedPayload { needed: u64, available: u64 },

    #[error("invariant violation: {0}")]
    InvariantViolation(&'static str),
}

impl Descriptor {
    pub fn new(layout: Layout, code_bits: Vec<bool>, biases: Vec<f64>) -> Result<Self> {
        let (bits, bias_count) = layout.validate().map_err(Error::InvalidArgument)?;
        if code_bits.len() as u64 != bits {
            return Err(Error::LengthMismatch {
                expected: bits as usize,
                found: code_bits.len(),
            });
        }
        if biases.len() as u64 != bias_count {
            return Err(Error::LengthMismatch {
                expected: bias_count as usize,
                found: biases.len(),
            });
        }
        if !biases.iter().all(|b| b.is_finite()) {
            return Err(Error::InvalidArgument("biases must be finite"));
        }
        Ok(Descriptor {
            layout,
            code_bits,
            biases,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn grid(&self) -> BlockGrid {
        self.layout.grid().expect("validated at construction")
    }

    pub fn code_bits(&self) -> &[bool] {
        &self.code_bits
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Secret of the `i`-th block in channel-major raster order.
    pub fn block_secret(&self, i: usize) -> BlockSecret {
        let reps = self.layout.reps as usize;
        BlockSecret {
            biases: self.biases[i * reps..(i + 1) * reps].to_vec(),
            code_bit: self.code_bits[i],
        }
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.code_bits.len().div_ceil(8) + 8 * self.biases.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let l = &self.layout;
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(l.mode.code());
        out.push(l.channels);
        out.extend_from_slice(&l.width.to_le_bytes());
        out.extend_from_slice(&l.height.to_le_bytes());
        out.extend_from_slice(&l.block_size.to_le_bytes());
        out.extend_from_slice(&l.reps.to_le_bytes());
        out.extend_from_slice(&l.margin.value().to_le_bytes());
        out.extend_from_slice(&l.fingerprint.to_le_bytes());
        for chunk in self.code_bits.chunks(8) {
            let byte = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &bit)| acc | (u8::from(bit) << (7 - i)));
            out.push(byte);
        }
        for b in &self.biases {
            out.extend_from_slice(&b.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> core::result::Result<Self, DecodeError> {
        let magic_seen = bytes.len().min(4);
        if bytes[..magic_seen] != MAGIC[..magic_seen] {
            return Err(DecodeError::MalformedHeader("bad magic"));
        }
        if bytes.len() < HEADER_LEN {
            return Err(DecodeError::TruncatedPayload {
                needed: HEADER_LEN as u64,
                available: bytes.len() as u64,
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());

        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(DecodeError::UnsupportedVersion(version));
        }
        let mode = ChannelMode::from_code(bytes[6])
            .ok_or(DecodeError::MalformedHeader("unknown channel mode"))?;
        let margin = Margin::new(f64::from_bits(u64_at(24)))
            .map_err(|_| DecodeError::InvariantViolation("margin must lie in [0, 0.5]"))?;
        let layout = Layout {
            width: u32_at(8),
            height: u32_at(12),
            channels: bytes[7],
            mode,
            block_size: u32_at(16),
            margin,
            reps: u32_at(20),
            fingerprint: u64_at(32),
        };
        let (bits, bias_count) = layout.validate().map_err(DecodeError::InvariantViolation)?;

        let code_len = bits.div_ceil(8);
        let needed = bias_count
            .checked_mul(8)
            .and_then(|n| n.checked_add(code_len))
            .and_then(|n| n.checked_add(HEADER_LEN as u64))
            .ok_or(DecodeError::InvariantViolation("payload size overflows"))?;
        let available = bytes.len() as u64;
        if available < needed {
            return Err(DecodeError::TruncatedPayload { needed, available });
        }
        if available > needed {
            return Err(DecodeError::InvariantViolation(
                "trailing bytes after biases",
            ));
        }

        // Lengths now fit in memory: they are bounded by `bytes.len()`.
        let (bits, code_len) = (bits as usize, code_len as usize);
        let code_bytes = &bytes[HEADER_LEN..HEADER_LEN + code_len];
        let code_bits: Vec<bool> = (0..bits)
            .map(|i| code_bytes[i / 8] >> (7 - i % 8) & 1 == 1)
            .collect();
        if bits % 8 != 0 && code_bytes[code_len - 1] & (0xFF >> (bits % 8)) != 0 {
            return Err(DecodeError::InvariantViolation(
                "non-zero code padding bits",
            ));
        }
        let biases: Vec<f64> = bytes[HEADER_LEN + code_len..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if !biases.iter().all(|b| b.is_finite()) {
            return Err(DecodeError::InvariantViolation("biases must be finite"));
        }
        Ok(Descriptor {
            layout,
            code_bits,
            biases,
        })
    }
}
