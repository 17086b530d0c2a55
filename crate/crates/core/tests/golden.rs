//! Descriptors produced by an independent implementation of the scheme.

use blockauth_core::{
    sign_image, verify_image, AuthKey, Descriptor, ImageBuffer, Margin, SignConfig,
};

const KEY: u64 = 0x0123_4567_89AB_CDEF;

fn gray_image() -> ImageBuffer {
    let mut img = ImageBuffer::filled(18, 10, 1, 0).unwrap();
    for y in 0..10 {
        for x in 0..18 {
            let v = if x < 4 && y < 4 {
                100
            } else {
                (x * 37 + y * 11 + (x * y) % 7) % 256
            };
            img.set(x, y, 0, v as u8);
        }
    }
    img
}

fn rgb_image() -> ImageBuffer {
    let mut img = ImageBuffer::filled(12, 12, 3, 0).unwrap();
    for y in 0..12 {
        for x in 0..12 {
            for c in 0..3 {
                img.set(x, y, c, ((x * 13 + y * 29 + c * 50) % 256) as u8);
            }
        }
    }
    img
}

fn check(img: &ImageBuffer, block_size: usize, margin: f64, reps: usize, expected: &[u8]) {
    let cfg = SignConfig {
        block_size,
        margin: Margin::new(margin).unwrap(),
        reps,
        ..SignConfig::default()
    };
    let d = sign_image(img, AuthKey::new(KEY), &cfg).unwrap();
    assert_eq!(d.encode(), expected);
    let decoded = Descriptor::decode(expected).unwrap();
    assert_eq!(decoded, d);
    assert_eq!(
        verify_image(img, &decoded, AuthKey::new(KEY)).unwrap().cdr,
        1.0
    );
}

#[test]
fn gray_descriptor_matches_reference_bytes() {
    check(
        &gray_image(),
        4,
        0.2,
        2,
        include_bytes!("data/gray_18x10_b4_r2.nnac"),
    );
}

#[test]
fn color_descriptor_matches_reference_bytes() {
    check(
        &rgb_image(),
        6,
        0.35,
        1,
        include_bytes!("data/rgb_12x12_b6_r1.nnac"),
    );
}

#[test]
fn flat_block_bias_is_the_bare_margin() {
    let d = Descriptor::decode(include_bytes!("data/gray_18x10_b4_r2.nnac")).unwrap();
    let first = d.block_secret(0);
    let t = if first.code_bit { 0.2 } else { -0.2 };
    assert_eq!(first.biases, [t, t]);
}
