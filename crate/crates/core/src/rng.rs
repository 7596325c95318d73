//! Reproducible random streams.
//!
//! A [`StreamFactory`] turns `(master seed, experiment name)` into a ChaCha8
//! key; replication `r` reads stream number `r` of that key. ChaCha streams
//! with one key never overlap, so replications can run on any number of
//! workers and still see exactly the same numbers.

use rand_chacha::rand_core::{RngCore, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

/// FNV-1a, 64 bit. Used only to fold a name into the key.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamFactory {
    key: [u8; 32],
}

impl StreamFactory {
    pub fn new(seed: u64, name: &str) -> Self {
        let mut state = seed ^ fnv1a(name.as_bytes()).rotate_left(17);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self { key }
    }

    /// Independent stream for replication `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }

    /// A second family of streams under the same seed, e.g. for a
    /// sub-experiment that must not share numbers with its parent.
    pub fn derive(&self, label: &str) -> Self {
        let mut state = u64::from_le_bytes(self.key[..8].try_into().unwrap()) ^ fnv1a(label.as_bytes());
        let mut key = self.key;
        for chunk in key.chunks_exact_mut(8) {
            let word = u64::from_le_bytes((&*chunk).try_into().unwrap());
            chunk.copy_from_slice(&(word ^ splitmix64(&mut state)).to_le_bytes());
        }
        Self { key }
    }
}

/// Uniform on the open interval (0, 1), 52-bit resolution (midpoints of a
/// 2^-52 grid, so both ends are excluded exactly).
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0)
}

/// Exponential(1) by inversion.
#[inline]
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -crate::math::ln(uniform(rng))
}
