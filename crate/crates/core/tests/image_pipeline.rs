use blockauth_core::prng::StreamState;
use blockauth_core::{
    add_gaussian_noise, estimate_security, normalize_block, sign_block, sign_image, verify_block,
    verify_image, verify_image_with, Aggregation, AuthKey, ImageBuffer, Margin, SignConfig,
    VerifyOptions,
};

fn random_image(width: usize, height: usize, channels: usize, seed: u64) -> ImageBuffer {
    let samples = StreamState::new(seed)
        .stream()
        .take(width * height * channels)
        .map(|v| (v >> 56) as u8)
        .collect();
    ImageBuffer::new(width, height, channels, samples).unwrap()
}

/// Smooth gradients plus mild texture; no flat blocks.
fn textured(width: usize, height: usize, seed: u64) -> ImageBuffer {
    let mut rng = StreamState::new(seed).stream();
    let samples = (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            let base = 128.0 + 60.0 * (x / 23.0).sin() * (y / 31.0).cos();
            (base + (rng.next_u64() >> 59) as f64 * 3.0).clamp(0.0, 255.0) as u8
        })
        .collect();
    ImageBuffer::gray(width, height, samples).unwrap()
}

#[test]
fn sign_then_verify_is_exact() {
    for (img, reps) in [
        (random_image(64, 48, 1, 1), 1),
        (random_image(72, 40, 3, 2), 3),
        (textured(130, 130, 3), 2),
    ] {
        let key = AuthKey::new(0xABCD);
        let cfg = SignConfig {
            reps,
            ..SignConfig::default()
        };
        let d = sign_image(&img, key, &cfg).unwrap();
        let r = verify_image(&img, &d, key).unwrap();
        assert_eq!(r.cdr, 1.0);
        assert_eq!(r.flagged_blocks(), 0);
        assert_eq!(d.encode(), sign_image(&img, key, &cfg).unwrap().encode());
    }
}

#[test]
fn lena_sized_code_is_large_enough() {
    let img = random_image(512, 512, 1, 5);
    let d = sign_image(&img, AuthKey::new(1), &SignConfig::default()).unwrap();
    let s = estimate_security(&d);
    assert_eq!(s.bits, 4096);
    assert_eq!(s.log2_space, 4096);
    assert!(!s.weak);
    assert_eq!(d.encode().len(), 40 + 4096 / 8 + 4096 * 8);
}

#[test]
fn small_image_is_weak() {
    let img = random_image(48, 48, 1, 5);
    let d = sign_image(&img, AuthKey::new(1), &SignConfig::default()).unwrap();
    assert_eq!(estimate_security(&d).bits, 36);
    assert!(estimate_security(&d).weak);
}

#[test]
fn pasted_region_is_contained() {
    let cfg = SignConfig {
        reps: 4,
        ..SignConfig::default()
    };
    let (mut inside, mut inside_flagged) = (0, 0);
    for trial in 0..8u64 {
        let key = AuthKey::new(0x5EED + trial);
        let img = textured(256, 256, 11 + trial);
        let foreign = random_image(256, 256, 1, 100 + trial);
        let d = sign_image(&img, key, &cfg).unwrap();

        let (x0, y0) = (20 + 21 * trial as usize, 150 - 13 * trial as usize);
        let mut tampered = img.clone();
        for y in y0..y0 + 64 {
            for x in x0..x0 + 64 {
                tampered.set(x, y, 0, foreign.get(x, y, 0));
            }
        }
        let r = verify_image(&tampered, &d, key).unwrap();
        for row in 0..32 {
            for col in 0..32 {
                let (bx, by) = (col * 8, row * 8);
                let touches = bx + 8 > x0 && bx < x0 + 64 && by + 8 > y0 && by < y0 + 64;
                if !touches {
                    assert!(!r.is_tampered(0, row, col), "false positive at {row},{col}");
                }
                if bx >= x0 && bx + 8 <= x0 + 64 && by >= y0 && by + 8 <= y0 + 64 {
                    inside += 1;
                    inside_flagged += r.is_tampered(0, row, col) as usize;
                }
            }
        }
    }
    let rate = inside_flagged as f64 / inside as f64;
    assert!(rate >= 0.85, "{inside_flagged}/{inside}");
}

#[test]
fn wrong_key_is_a_coin_flip() {
    let img = random_image(256, 256, 1, 21);
    let d = sign_image(&img, AuthKey::new(1), &SignConfig::default()).unwrap();
    let opts = VerifyOptions {
        check_fingerprint: false,
        ..VerifyOptions::default()
    };
    let r = verify_image_with(&img, &d, AuthKey::new(2), &opts).unwrap();
    assert_eq!(r.total_bits(), 1024);
    assert!((0.40..=0.60).contains(&r.cdr), "{}", r.cdr);
}

#[test]
fn inverted_blocks_are_caught_with_eight_reps() {
    let key = AuthKey::new(77);
    let mut pixels = StreamState::new(3).stream();
    let trials = 2000;
    let mut flagged = 0;
    for i in 0..trials {
        let px: Vec<u8> = (0..64).map(|_| (pixels.next_u64() >> 56) as u8).collect();
        if normalize_block(&px).unwrap().is_flat() {
            continue;
        }
        let inv: Vec<u8> = px.iter().map(|&x| 255 - x).collect();
        let s = sign_block(&px, key, 0, i, i % 2 == 0, Margin::DEFAULT, 8).unwrap();
        flagged += !verify_block(&inv, key, 0, i, &s, Aggregation::Any)
            .unwrap()
            .matched as usize;
    }
    let rate = flagged as f64 / trials as f64;
    println!("inverted-block detection rate, R=8: {rate:.4}");
    // Each repetition survives inversion with probability a bit above 1/2
    // (it needs sum w p < T/2), so the rate sits slightly under 1 - 2^-8.
    assert!(rate >= 0.98, "{rate}");
}

#[test]
fn majority_tolerates_single_flip() {
    let key = AuthKey::new(4);
    let img = textured(64, 64, 4);
    let cfg = SignConfig {
        reps: 5,
        ..SignConfig::default()
    };
    let d = sign_image(&img, key, &cfg).unwrap();
    let noisy = add_gaussian_noise(&img, 0.0005, 9).unwrap();
    let any = verify_image(&noisy, &d, key).unwrap();
    let maj = verify_image_with(
        &noisy,
        &d,
        key,
        &VerifyOptions {
            aggregation: Aggregation::Majority,
            check_fingerprint: true,
        },
    )
    .unwrap();
    assert_eq!(any.cdr, maj.cdr);
    assert!(maj.flagged_blocks() <= any.flagged_blocks());
}

#[test]
fn noise_statistics() {
    let gray = ImageBuffer::filled(512, 512, 1, 128).unwrap();
    let noisy = add_gaussian_noise(&gray, 0.01, 42).unwrap();
    assert_eq!(noisy, add_gaussian_noise(&gray, 0.01, 42).unwrap());
    assert_ne!(noisy, add_gaussian_noise(&gray, 0.01, 43).unwrap());
    let diffs: Vec<f64> = noisy
        .samples()
        .iter()
        .map(|&v| (v as f64 - 128.0) / 255.0)
        .collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt();
    println!("noise sd at variance 0.01: {sd:.4}");
    assert!((0.07..=0.12).contains(&sd), "{sd}");
}
