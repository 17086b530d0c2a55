//! SplitMix64 streams keyed per (channel, block, repetition).
//!
//! Every stream is derived statelessly from the key and indices, so any block
//! can be signed or verified on its own and in any order.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Weyl increment of SplitMix64.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// Domain separator for default code bits.
pub const CODE_TAG: u64 = 0xC0DE_C0DE_C0DE_C0DE;
/// Domain separator for key fingerprints.
pub const FINGERPRINT_TAG: u64 = 0xF1A6_F1A6_F1A6_F1A6;

/// SplitMix64 output mixer, usable as a stateless 64-bit hash.
#[inline]
pub const fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps a 64-bit draw to `[0, 1)` using its top 53 bits.
#[inline]
pub fn unit_f64(value: u64) -> f64 {
    (value >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The 64-bit secret seed.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AuthKey(u64);

impl AuthKey {
    pub const fn new(k: u64) -> Self {
        AuthKey(k)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// Public 8-byte fingerprint stored in descriptors to catch wrong keys.
    pub const fn fingerprint(self) -> u64 {
        finalize(self.0 ^ FINGERPRINT_TAG)
    }
}

// Keys are secret; keep them out of logs.
impl core::fmt::Debug for AuthKey {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "AuthKey(fp={:016x})", self.fingerprint())
    }
}

impl From<u64> for AuthKey {
    fn from(k: u64) -> Self {
        AuthKey(k)
    }
}

/// Raw SplitMix64 state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamState(u64);

impl StreamState {
    pub const fn new(state: u64) -> Self {
        StreamState(state)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// One SplitMix64 step: returns the advanced state and its output.
    #[inline]
    pub const fn next(self) -> (StreamState, u64) {
        let state = self.0.wrapping_add(GOLDEN_GAMMA);
        (StreamState(state), finalize(state))
    }

    /// Turns the state into an iterator of outputs.
    pub const fn stream(self) -> Stream {
        Stream { state: self }
    }
}

/// Infinite iterator over SplitMix64 outputs.
#[derive(Clone, Debug)]
pub struct Stream {
    state: StreamState,
}

impl Stream {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let (state, value) = self.state.next();
        self.state = state;
        value
    }

    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    pub fn state(&self) -> StreamState {
        self.state
    }
}

impl Iterator for Stream {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        Some(self.next_u64())
    }
}

/// Seed of the weight stream for one (channel, block, repetition).
pub fn derive_block_seed(
    key: AuthKey,
    channel: usize,
    block_index: usize,
    repetition: usize,
) -> StreamState {
    let z = finalize(key.0);
    let z = finalize(z ^ channel as u64);
    let z = finalize(z ^ block_index as u64);
    StreamState(finalize(z ^ repetition as u64))
}

/// Fills `out` with weights in `[0, 1)` drawn from `seed`.
pub fn fill_weights(seed: StreamState, out: &mut [f64]) {
    let mut stream = seed.stream();
    for w in out.iter_mut() {
        *w = stream.next_unit();
    }
}

/// `n` weights in `[0, 1)` drawn from `seed`.
pub fn gen_weights(seed: StreamState, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("weight count must be at least 1"));
    }
    let mut w = alloc::vec![0.0; n];
    fill_weights(seed, &mut w);
    Ok(w)
}

/// Default code bit for a block: MSB of the keyed hash chain.
pub fn gen_code_bit(key: AuthKey, channel: usize, block_index: usize) -> bool {
    let z = finalize(key.0 ^ CODE_TAG);
    let z = finalize(z ^ channel as u64);
    finalize(z ^ block_index as u64) >> 63 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn next_is_pure() {
        let s = StreamState::new(42);
        assert_eq!(s.next(), s.next());
        let a: Vec<u64> = s.stream().take(1000).collect();
        let b: Vec<u64> = s.stream().take(1000).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_weights_rejected() {
        assert_eq!(
            gen_weights(StreamState::new(1), 0),
            Err(Error::InvalidArgument("weight count must be at least 1"))
        );
    }

    #[test]
    fn weights_in_range() {
        let w = gen_weights(derive_block_seed(AuthKey::new(9), 0, 3, 0), 64).unwrap();
        assert_eq!(w.len(), 64);
        assert!(w.iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn unit_never_reaches_one() {
        assert!(unit_f64(u64::MAX) < 1.0);
        assert_eq!(unit_f64(0), 0.0);
    }

    #[test]
    fn seeds_differ_by_index_and_key() {
        let k = AuthKey::new(0x0123_4567_89ab_cdef);
        assert_eq!(derive_block_seed(k, 0, 0, 0), derive_block_seed(k, 0, 0, 0));
        assert_ne!(derive_block_seed(k, 0, 0, 0), derive_block_seed(k, 0, 1, 0));
        assert_ne!(derive_block_seed(k, 0, 0, 0), derive_block_seed(k, 1, 0, 0));
        assert_ne!(derive_block_seed(k, 0, 0, 0), derive_block_seed(k, 0, 0, 1));
        assert_ne!(
            derive_block_seed(k, 0, 0, 0),
            derive_block_seed(AuthKey::new(k.value() + 1), 0, 0, 0)
        );
    }

    #[test]
    fn debug_hides_key() {
        let s = alloc::format!("{:?}", AuthKey::new(0xdead_beef));
        assert!(!s.contains("deadbeef"));
    }
}
