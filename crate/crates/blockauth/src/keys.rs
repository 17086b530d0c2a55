//! Key parsing and code-bitmap loading for the command line.

use blockauth_core::{AuthKey, BlockGrid, ImageBuffer};

use crate::error::{Error, Result};

/// Parses exactly 16 hex digits, optionally prefixed with `0x`.
pub fn parse_key(text: &str) -> Result<AuthKey> {
    let hex = text.trim();
    let hex = hex.strip_prefix("0x").unwrap_or(hex);
    if hex.len() != 16 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::InvalidArgument(
            "key must be 16 hex digits".to_string(),
        ));
    }
    u64::from_str_radix(hex, 16)
        .map(AuthKey::new)
        .map_err(|e| Error::InvalidArgument(format!("key: {e}")))
}

/// Reads code bits from a bitmap with one pixel per block: dark (< 128) is 1.
///
/// A `cols x rows` bitmap is reused for every channel; a
/// `cols x (rows * channels)` bitmap gives each channel its own band.
pub fn code_bits_from_bitmap(
    bitmap: &ImageBuffer,
    grid: &BlockGrid,
    channels: usize,
) -> Result<Vec<bool>> {
    let luma = bitmap.luma();
    let (w, h) = (luma.width(), luma.height());
    let bits: Vec<bool> = luma.samples().iter().map(|&v| v < 128).collect();
    if w == grid.cols() && h == grid.rows() {
        Ok(bits.repeat(channels))
    } else if w == grid.cols() && h == grid.rows() * channels {
        Ok(bits)
    } else {
        Err(Error::InvalidArgument(format!(
            "code bitmap is {w}x{h}, expected {}x{} or {}x{}",
            grid.cols(),
            grid.rows(),
            grid.cols(),
            grid.rows() * channels
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys() {
        assert_eq!(
            parse_key("0123456789abcdef").unwrap().value(),
            0x0123_4567_89ab_cdef
        );
        assert_eq!(parse_key("0xFFFFFFFFFFFFFFFF").unwrap().value(), u64::MAX);
        assert!(parse_key("123").is_err());
        assert!(parse_key("0123456789abcdeg").is_err());
        assert!(parse_key("+123456789abcdef").is_err());
    }

    #[test]
    fn bitmap_shapes() {
        let grid = BlockGrid::new(32, 16, 8).unwrap(); // 2 rows x 4 cols
        let bmp = ImageBuffer::gray(4, 2, vec![0, 255, 0, 255, 255, 255, 0, 0]).unwrap();
        let bits = code_bits_from_bitmap(&bmp, &grid, 3).unwrap();
        assert_eq!(bits.len(), 24);
        assert_eq!(
            &bits[..8],
            &[true, false, true, false, false, false, true, true]
        );
        assert_eq!(&bits[8..16], &bits[..8]);
        let tall = ImageBuffer::gray(4, 6, vec![0; 24]).unwrap();
        assert_eq!(
            code_bits_from_bitmap(&tall, &grid, 3).unwrap(),
            vec![true; 24]
        );
        assert!(code_bits_from_bitmap(&tall, &grid, 1).is_err());
    }
}
