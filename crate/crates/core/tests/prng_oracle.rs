//! Golden vectors for the keyed generator, checked against a second
//! straight-from-definition SplitMix64 written with u128 arithmetic.

use blockauth_core::prng::{derive_block_seed, gen_code_bit, gen_weights, AuthKey, StreamState};

const MOD: u128 = 1 << 64;

fn oracle_mix(z: u64) -> u64 {
    let mut z = z as u128;
    z ^= z >> 30;
    z = z * 0xBF58_476D_1CE4_E5B9 % MOD;
    z ^= z >> 27;
    z = z * 0x94D0_49BB_1331_11EB % MOD;
    (z ^ (z >> 31)) as u64
}

fn oracle_stream(seed: u64, n: usize) -> Vec<u64> {
    let mut s = seed as u128;
    (0..n)
        .map(|_| {
            s = (s + 0x9E37_79B9_7F4A_7C15) % MOD;
            oracle_mix(s as u64)
        })
        .collect()
}

// Computed with the oracle above (and an independent script) before the
// library existed. The first value is the published SplitMix64 output for seed 0.
const SEED0: [u64; 4] = [
    0xE220_A839_7B1D_CDAF,
    0x6E78_9E6A_A1B9_65F4,
    0x06C4_5D18_8009_454F,
    0xF88B_B8A8_724C_81EC,
];
const KEY: u64 = 0x0123_4567_89AB_CDEF;
const KEY_SEED_000: u64 = 0x48D8_560F_2D1C_5A0A;
const KEY_SEED_010: u64 = 0x2B8D_A2DF_7DE6_903D;
const KEY_WEIGHTS: [f64; 4] = [
    0.439_217_597_946_158_67,
    0.769_999_706_579_880_5,
    0.633_599_151_066_693_4,
    0.209_349_092_809_787_97,
];
const KEY_FINGERPRINT: u64 = 0xDD66_89F2_A123_D55D;
const KEY_CODE_BITS: [u8; 16] = [0, 0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1];

#[test]
fn oracle_agrees_with_golden() {
    assert_eq!(oracle_stream(0, 4), SEED0);
}

#[test]
fn sm_next_from_zero() {
    let mut s = StreamState::new(0);
    for &want in &SEED0 {
        let (next, v) = s.next();
        assert_eq!(v, want);
        s = next;
    }
}

#[test]
fn long_stream_matches_oracle() {
    let seed = 0xDEAD_BEEF_u64;
    let got: Vec<u64> = StreamState::new(seed).stream().take(1000).collect();
    assert_eq!(got, oracle_stream(seed, 1000));
}

#[test]
fn block_seed_chain() {
    let k = AuthKey::new(KEY);
    let chain =
        |c: u64, i: u64, r: u64| oracle_mix(oracle_mix(oracle_mix(oracle_mix(KEY) ^ c) ^ i) ^ r);
    assert_eq!(chain(0, 0, 0), KEY_SEED_000);
    assert_eq!(chain(0, 1, 0), KEY_SEED_010);
    assert_eq!(derive_block_seed(k, 0, 0, 0).value(), KEY_SEED_000);
    assert_eq!(derive_block_seed(k, 0, 1, 0).value(), KEY_SEED_010);
    assert_ne!(
        derive_block_seed(AuthKey::new(KEY ^ 1), 0, 0, 0).value(),
        KEY_SEED_000
    );
    for (c, i, r) in [(2, 7, 3), (1, 4095, 0), (0, 0, 7)] {
        assert_eq!(
            derive_block_seed(k, c as usize, i as usize, r as usize).value(),
            chain(c, i, r)
        );
    }
}

#[test]
fn weights_match_oracle_over_two_pow_64() {
    let w = gen_weights(derive_block_seed(AuthKey::new(KEY), 0, 0, 0), 4).unwrap();
    let raw = oracle_stream(KEY_SEED_000, 4);
    for ((&got, &want), &v) in w.iter().zip(&KEY_WEIGHTS).zip(&raw) {
        assert_eq!(got, want);
        assert!((got - v as f64 / 2f64.powi(64)).abs() < 1e-15);
    }
}

#[test]
fn fingerprint_and_code_bits() {
    let k = AuthKey::new(KEY);
    assert_eq!(k.fingerprint(), KEY_FINGERPRINT);
    let bits: Vec<u8> = (0..16).map(|i| gen_code_bit(k, 0, i) as u8).collect();
    assert_eq!(bits, KEY_CODE_BITS);
}

#[test]
fn code_bits_balanced() {
    let k = AuthKey::new(KEY);
    let ones = (0..4096).filter(|&i| gen_code_bit(k, 0, i)).count();
    let frac = ones as f64 / 4096.0;
    assert!((0.45..=0.55).contains(&frac), "{frac}");
}

#[test]
fn first_outputs_never_collide_across_blocks() {
    let k = AuthKey::new(KEY);
    let mut first: Vec<u64> = (0..2000)
        .map(|i| derive_block_seed(k, 0, i, 0).next().1)
        .collect();
    first.sort_unstable();
    first.dedup();
    assert_eq!(first.len(), 2000);
}

#[test]
fn weight_mean_is_half() {
    let w = gen_weights(derive_block_seed(AuthKey::new(99), 0, 0, 0), 1 << 12).unwrap();
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    assert!((0.48..=0.52).contains(&mean), "{mean}");
}
