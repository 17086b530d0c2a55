//! JPEG round-trips and generic image loading/saving.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use blockauth_core::ImageBuffer;
use image::codecs::jpeg::JpegEncoder;
use image::{DynamicImage, ExtendedColorType, ImageFormat};

use crate::error::{Error, Result};
use crate::pnm;

/// Identity of the JPEG codec behind [`jpeg_roundtrip`], for reports.
pub const JPEG_CODEC: &str = "image-rs jpeg (image 0.25, baseline encoder)";

/// Encodes as baseline JPEG at `quality` (1..=100) and decodes back.
pub fn jpeg_roundtrip(image: &ImageBuffer, quality: u8) -> Result<ImageBuffer> {
    if !(1..=100).contains(&quality) {
        return Err(Error::InvalidArgument(format!(
            "JPEG quality {quality} outside 1..=100"
        )));
    }
    let color = match image.channels() {
        1 => ExtendedColorType::L8,
        _ => ExtendedColorType::Rgb8,
    };
    let mut buf = Vec::new();
    JpegEncoder::new_with_quality(&mut buf, quality).encode(
        image.samples(),
        image.width() as u32,
        image.height() as u32,
        color,
    )?;
    let decoded = image::load_from_memory_with_format(&buf, ImageFormat::Jpeg)?;
    let samples = match image.channels() {
        1 => decoded.to_luma8().into_raw(),
        _ => decoded.to_rgb8().into_raw(),
    };
    Ok(ImageBuffer::new(
        image.width(),
        image.height(),
        image.channels(),
        samples,
    )?)
}

fn from_dynamic(img: DynamicImage) -> Result<ImageBuffer> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if img.color().has_color() {
        Ok(ImageBuffer::rgb(w, h, img.to_rgb8().into_raw())?)
    } else {
        Ok(ImageBuffer::gray(w, h, img.to_luma8().into_raw())?)
    }
}

/// Decodes PGM/PPM, PNG or JPEG bytes. Alpha is dropped.
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    if pnm::is_pnm(bytes) {
        return pnm::decode(bytes);
    }
    from_dynamic(image::load_from_memory(bytes)?)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

/// Encodes by file extension: `pgm`/`ppm`/`pnm` or `png`.
pub fn encode_image(image: &ImageBuffer, path: &Path) -> Result<Vec<u8>> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("pgm" | "ppm" | "pnm") => Ok(pnm::encode(image)),
        Some("png") => {
            let color = match image.channels() {
                1 => ExtendedColorType::L8,
                _ => ExtendedColorType::Rgb8,
            };
            let mut out = Cursor::new(Vec::new());
            image::write_buffer_with_format(
                &mut out,
                image.samples(),
                image.width() as u32,
                image.height() as u32,
                color,
                ImageFormat::Png,
            )?;
            Ok(out.into_inner())
        }
        _ => Err(Error::InvalidArgument(format!(
            "{}: unsupported output format (use .pgm, .ppm or .png)",
            path.display()
        ))),
    }
}

pub fn save_image(image: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_image(image, path)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
