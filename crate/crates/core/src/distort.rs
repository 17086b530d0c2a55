//! Reproducible additive Gaussian noise.

use crate::error::{Error, Result};
use crate::pipeline::ImageBuffer;
use crate::prng::{Stream, StreamState};

/// Standard normal deviates from a SplitMix64 stream via Box–Muller.
///
/// Each pair of uniforms yields two deviates, `r cos θ` then `r sin θ`.
pub struct GaussianStream {
    uniforms: Stream,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream {
            uniforms: StreamState::new(seed).stream(),
            spare: None,
        }
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.uniforms.next_unit();
        let u2 = self.uniforms.next_unit();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = core::f64::consts::TAU * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }
}

/// Adds `N(0, variance)` noise on the unit intensity scale to every sample:
/// `x -> clamp(round(x + 255 g), 0, 255)`.
pub fn add_gaussian_noise(image: &ImageBuffer, variance: f64, seed: u64) -> Result<ImageBuffer> {
    if !variance.is_finite() || variance < 0.0 {
        return Err(Error::InvalidArgument(
            "noise variance must be finite and >= 0",
        ));
    }
    let mut out = image.clone();
    if variance == 0.0 {
        return Ok(out);
    }
    let sigma = 255.0 * libm::sqrt(variance);
    let mut normals = GaussianStream::new(seed);
    for x in out.samples_mut() {
        let noisy = libm::round(*x as f64 + sigma * normals.next_standard());
        *x = noisy.clamp(0.0, 255.0) as u8;
    }
    Ok(out)
}
