//! Counter-based randomness and hierarchical seed derivation.
//!
//! Code blocks and erasure patterns are pure functions of
//! `(seed, domain, a, b, c)` through a SplitMix64 finalizer chain, so they can
//! be regenerated bit-exactly in any language. Continuous noise draws use a
//! ChaCha8 stream seeded from a derived key.
//!
//! Seed keys used by the simulator (all relative to the master seed):
//!
//! | key                       | stream                         |
//! |---------------------------|--------------------------------|
//! | `code/<i>`                | seed of the i-th sampled code  |
//! | `trial/<j>/channel`       | erasure pattern of trial j     |
//! | `trial/<j>/noise`         | plant and sensor noise         |
//! | `trial/<j>/message`       | message bits (reliability runs)|

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier recorded in code files for [`mix`].
pub const PRNG_ID: &str = "splitmix64-v1";

/// Key domain for parity-block bits.
pub const DOMAIN_CODE: u64 = 0x636f_6465; // "code"
/// Key domain for channel erasures.
pub const DOMAIN_CHANNEL: u64 = 0x6265_6300; // "bec\0"

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash of a key tuple; each coordinate is absorbed with one finalizer round.
#[inline]
pub fn mix(seed: u64, domain: u64, a: u64, b: u64, c: u64) -> u64 {
    let mut h = splitmix64(seed);
    for x in [domain, a, b, c] {
        h = splitmix64(h ^ x);
    }
    h
}

/// Maps a 64-bit hash to `[0, 1)` using its top 53 bits.
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Bernoulli draw keyed by `(seed, domain, a, b, c)`.
#[inline]
pub fn bernoulli(p: f64, seed: u64, domain: u64, a: u64, b: u64, c: u64) -> bool {
    if p >= 1.0 {
        return true;
    }
    if p <= 0.0 {
        return false;
    }
    unit_f64(mix(seed, domain, a, b, c)) < p
}

/// Derives a child seed from a parent seed and a key string.
pub fn derive_seed(parent: u64, key: &str) -> u64 {
    let mut h = splitmix64(parent ^ 0x5eed);
    for chunk in key.as_bytes().chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        h = splitmix64(h ^ u64::from_le_bytes(buf));
    }
    splitmix64(h ^ key.len() as u64)
}

/// Stream RNG for continuous draws.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
