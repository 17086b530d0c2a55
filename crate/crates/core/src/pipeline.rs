//! Image-level signing and verification over a grid of square blocks.

use alloc::borrow::Cow;
use alloc::vec::Vec;

use crate::descriptor::{Descriptor, Layout};
use crate::error::{Error, Result};
use crate::neuron::{sign_block, verify_block, Aggregation, BlockSecret, Margin};
use crate::prng::{gen_code_bit, AuthKey};

/// 8-bit image, row-major with interleaved channels (1 = gray, 3 = RGB).
#[derive(Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl core::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidArgument("channel count must be 1 or 3"));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("image dimensions must be non-zero"));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or(Error::InvalidArgument("image dimensions overflow"))?;
        if samples.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: samples.len(),
            });
        }
        Ok(ImageBuffer {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn gray(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 1, samples)
    }

    pub fn rgb(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 3, samples)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        let len = width.saturating_mul(height).saturating_mul(channels);
        Self::new(width, height, channels, alloc::vec![value; len])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.samples[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, value: u8) {
        self.samples[(y * self.width + x) * self.channels + c] = value;
    }

    /// BT.601 luma in integer arithmetic: `(299 R + 587 G + 114 B + 500) / 1000`.
    /// Gray images are returned unchanged.
    pub fn luma(&self) -> ImageBuffer {
        if self.channels == 1 {
            return self.clone();
        }
        let samples = self
            .samples
            .chunks_exact(3)
            .map(|px| {
                let y = 299 * px[0] as u32 + 587 * px[1] as u32 + 114 * px[2] as u32 + 500;
                (y / 1000) as u8
            })
            .collect();
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: 1,
            samples,
        }
    }
}

/// Which planes are authenticated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ChannelMode {
    /// Every channel independently.
    #[default]
    PerChannel,
    /// Only the BT.601 luma plane.
    Luma,
}

impl ChannelMode {
    pub const fn code(self) -> u8 {
        match self {
            ChannelMode::PerChannel => 0,
            ChannelMode::Luma => 1,
        }
    }

    pub const fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(ChannelMode::PerChannel),
            1 => Some(ChannelMode::Luma),
            _ => None,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            ChannelMode::PerChannel => "per-channel",
            ChannelMode::Luma => "luma",
        }
    }

    pub const fn effective_channels(self, image_channels: usize) -> usize {
        match self {
            ChannelMode::PerChannel => image_channels,
            ChannelMode::Luma => 1,
        }
    }

    fn source(self, image: &ImageBuffer) -> Cow<'_, ImageBuffer> {
        match self {
            ChannelMode::Luma if image.channels > 1 => Cow::Owned(image.luma()),
            _ => Cow::Borrowed(image),
        }
    }
}

/// Floor partition of an image into `B x B` blocks. Right and bottom strips
/// narrower than `B` are not covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockGrid {
    width: usize,
    height: usize,
    block_size: usize,
    rows: usize,
    cols: usize,
}

impl BlockGrid {
    pub fn new(width: usize, height: usize, block_size: usize) -> Result<Self> {
        if block_size < 2 {
            return Err(Error::InvalidArgument("block size must be at least 2"));
        }
        if width < block_size || height < block_size {
            return Err(Error::ImageTooSmall {
                width,
                height,
                block_size,
            });
        }
        Ok(BlockGrid {
            width,
            height,
            block_size,
            rows: height / block_size,
            cols: width / block_size,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Blocks per channel.
    pub fn block_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn pixels_per_block(&self) -> usize {
        self.block_size * self.block_size
    }

    pub fn covered_width(&self) -> usize {
        self.cols * self.block_size
    }

    pub fn covered_height(&self) -> usize {
        self.rows * self.block_size
    }

    pub fn uncovered_right(&self) -> usize {
        self.width - self.covered_width()
    }

    pub fn uncovered_bottom(&self) -> usize {
        self.height - self.covered_height()
    }

    /// `(row, col)` of a raster block index.
    pub fn position(&self, index: usize) -> (usize, usize) {
        (index / self.cols, index % self.cols)
    }

    /// Copies one block of channel `c` into `out` (length `B * B`).
    pub fn gather(&self, image: &ImageBuffer, c: usize, index: usize, out: &mut [u8]) {
        let b = self.block_size;
        let (row, col) = self.position(index);
        let (x0, y0) = (col * b, row * b);
        let ch = image.channels;
        for (dy, dst) in out.chunks_exact_mut(b).enumerate() {
            let start = ((y0 + dy) * image.width + x0) * ch + c;
            for (dx, px) in dst.iter_mut().enumerate() {
                *px = image.samples[start + dx * ch];
            }
        }
    }
}

/// One block of one channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub channel: usize,
    pub index: usize,
    pub row: usize,
    pub col: usize,
    pub pixels: Vec<u8>,
}

/// Blocks in channel-major, then raster order.
pub struct Blocks<'a> {
    image: &'a ImageBuffer,
    grid: BlockGrid,
    next: usize,
}

impl Iterator for Blocks<'_> {
    type Item = Block;

    fn next(&mut self) -> Option<Block> {
        let per_channel = self.grid.block_count();
        if self.next >= per_channel * self.image.channels {
            return None;
        }
        let (channel, index) = (self.next / per_channel, self.next % per_channel);
        self.next += 1;
        let mut pixels = alloc::vec![0; self.grid.pixels_per_block()];
        self.grid.gather(self.image, channel, index, &mut pixels);
        let (row, col) = self.grid.position(index);
        Some(Block {
            channel,
            index,
            row,
            col,
            pixels,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.grid.block_count() * self.image.channels - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Blocks<'_> {}

pub fn partition(image: &ImageBuffer, block_size: usize) -> Result<(BlockGrid, Blocks<'_>)> {
    let grid = BlockGrid::new(image.width, image.height, block_size)?;
    Ok((
        grid,
        Blocks {
            image,
            grid,
            next: 0,
        },
    ))
}

/// Where the code bits come from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum CodeSource {
    /// Derived from the key per (channel, block).
    #[default]
    KeyDerived,
    /// Caller-supplied bits, channel-major then raster.
    Bits(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignConfig {
    pub block_size: usize,
    pub margin: Margin,
    pub reps: usize,
    pub mode: ChannelMode,
    pub code: CodeSource,
}

impl Default for SignConfig {
    fn default() -> Self {
        SignConfig {
            block_size: 8,
            margin: Margin::DEFAULT,
            reps: 1,
            mode: ChannelMode::PerChannel,
            code: CodeSource::KeyDerived,
        }
    }
}

/// Signs every covered block of `image`. The image itself is not modified.
pub fn sign_image(image: &ImageBuffer, key: AuthKey, config: &SignConfig) -> Result<Descriptor> {
    if config.reps == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1"));
    }
    let source = config.mode.source(image);
    let (grid, blocks) = partition(&source, config.block_size)?;
    let total = grid.block_count() * source.channels;
    let code_bits = match &config.code {
        CodeSource::KeyDerived => (0..total)
            .map(|i| gen_code_bit(key, i / grid.block_count(), i % grid.block_count()))
            .collect(),
        CodeSource::Bits(bits) if bits.len() == total => bits.clone(),
        CodeSource::Bits(bits) => {
            return Err(Error::CodeSizeMismatch {
                expected: total,
                found: bits.len(),
            })
        }
    };

    let mut biases = Vec::with_capacity(total * config.reps);
    for (block, &bit) in blocks.zip(&code_bits) {
        let secret = sign_block(
            &block.pixels,
            key,
            block.channel,
            block.index,
            bit,
            config.margin,
            config.reps,
        )?;
        biases.extend_from_slice(&secret.biases);
    }

    let layout = Layout {
        width: to_u32(image.width)?,
        height: to_u32(image.height)?,
        channels: image.channels as u8,
        mode: config.mode,
        block_size: to_u32(config.block_size)?,
        margin: config.margin,
        reps: to_u32(config.reps)?,
        fingerprint: key.fingerprint(),
    };
    Descriptor::new(layout, code_bits, biases)
}

fn to_u32(v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::InvalidArgument("value does not fit in 32 bits"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub aggregation: Aggregation,
    /// Reject keys whose fingerprint differs from the descriptor's.
    pub check_fingerprint: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            aggregation: Aggregation::Any,
            check_fingerprint: true,
        }
    }
}

/// Per-block outcome of verifying an image against a descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub layout: Layout,
    pub grid: BlockGrid,
    pub aggregation: Aggregation,
    /// Planes that were authenticated.
    pub effective_channels: usize,
    /// Stored code bits, channel-major then raster.
    pub code_bits: Vec<bool>,
    /// Extracted bits, `reps` per block, same block order.
    pub extracted: Vec<bool>,
    /// Per-block pass flag.
    pub matched: Vec<bool>,
    /// Extracted bits that equal their block's code bit, over all extracted bits.
    pub cdr: f64,
}

impl VerificationReport {
    pub fn reps(&self) -> usize {
        self.layout.reps as usize
    }

    pub fn total_bits(&self) -> usize {
        self.extracted.len()
    }

    pub fn matched_bits(&self) -> usize {
        let reps = self.reps();
        self.extracted
            .chunks_exact(reps)
            .zip(&self.code_bits)
            .map(|(bits, &s)| bits.iter().filter(|&&b| b == s).count())
            .sum()
    }

    pub fn mismatch_fraction(&self) -> f64 {
        1.0 - self.cdr
    }

    /// True where a block failed, channel-major then raster.
    pub fn tamper_mask(&self) -> Vec<bool> {
        self.matched.iter().map(|&m| !m).collect()
    }

    pub fn flagged_blocks(&self) -> usize {
        self.matched.iter().filter(|&&m| !m).count()
    }

    pub fn is_tampered(&self, channel: usize, row: usize, col: usize) -> bool {
        !self.matched[channel * self.grid.block_count() + row * self.grid.cols() + col]
    }

    /// Flagged in any authenticated channel.
    pub fn any_channel_tampered(&self, row: usize, col: usize) -> bool {
        (0..self.effective_channels).any(|c| self.is_tampered(c, row, col))
    }

    pub fn block_bits(&self, channel: usize, index: usize) -> &[bool] {
        let reps = self.reps();
        let start = (channel * self.grid.block_count() + index) * reps;
        &self.extracted[start..start + reps]
    }
}

pub fn verify_image(
    image: &ImageBuffer,
    descriptor: &Descriptor,
    key: AuthKey,
) -> Result<VerificationReport> {
    verify_image_with(image, descriptor, key, &VerifyOptions::default())
}

pub fn verify_image_with(
    image: &ImageBuffer,
    descriptor: &Descriptor,
    key: AuthKey,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let layout = *descriptor.layout();
    let expected = (
        layout.width as usize,
        layout.height as usize,
        layout.channels as usize,
    );
    let found = (image.width, image.height, image.channels);
    if expected != found {
        return Err(Error::GeometryMismatch { expected, found });
    }
    if options.check_fingerprint && key.fingerprint() != layout.fingerprint {
        return Err(Error::FingerprintMismatch {
            expected: layout.fingerprint,
            found: key.fingerprint(),
        });
    }

    let source = layout.mode.source(image);
    let (grid, blocks) = partition(&source, layout.block_size as usize)?;
    let reps = layout.reps as usize;
    let code_bits = descriptor.code_bits().to_vec();
    let mut extracted = Vec::with_capacity(code_bits.len() * reps);
    let mut matched = Vec::with_capacity(code_bits.len());
    for ((block, &bit), biases) in blocks
        .zip(&code_bits)
        .zip(descriptor.biases().chunks_exact(reps))
    {
        let secret = BlockSecret {
            biases: biases.to_vec(),
            code_bit: bit,
        };
        let verdict = verify_block(
            &block.pixels,
            key,
            block.channel,
            block.index,
            &secret,
            options.aggregation,
        )?;
        extracted.extend_from_slice(&verdict.bits);
        matched.push(verdict.matched);
    }

    let mut report = VerificationReport {
        layout,
        grid,
        aggregation: options.aggregation,
        effective_channels: source.channels,
        code_bits,
        extracted,
        matched,
        cdr: 0.0,
    };
    report.cdr = report.matched_bits() as f64 / report.total_bits() as f64;
    Ok(report)
}

/// Block-resolution map over the covered area: black where any channel's
/// block failed, white elsewhere.
pub fn render_tamper_map(report: &VerificationReport) -> ImageBuffer {
    let grid = &report.grid;
    let b = grid.block_size();
    let (w, h) = (grid.covered_width(), grid.covered_height());
    let mut samples = alloc::vec![255u8; w * h];
    for row in 0..grid.rows() {
        for col in 0..grid.cols() {
            if !report.any_channel_tampered(row, col) {
                continue;
            }
            for y in row * b..(row + 1) * b {
                samples[y * w + col * b..y * w + (col + 1) * b].fill(0);
            }
        }
    }
    ImageBuffer {
        width: w,
        height: h,
        channels: 1,
        samples,
    }
}
