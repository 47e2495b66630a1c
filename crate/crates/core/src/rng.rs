//! Deterministic pseudo-random numbers for splits and synthetic data.
//!
//! Reproducibility across machines and releases matters more here than
//! statistical sophistication: a lock-box split or a synthetic dataset must
//! be exactly reconstructible from its seed alone. We therefore pin the
//! generator to a fixed, fully documented algorithm rather than depending on
//! an external crate whose stream might change between versions.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood's `SplittableRandom`
//! mixing function, as published by Vigna in the public domain):
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Derived conventions, all part of the stable protocol:
//!
//! - `f64` in `[0, 1)`: take the top 53 bits, `(output >> 11) * 2^-53`.
//! - Bounded integers: rejection sampling on the raw 64-bit output (no
//!   modulo bias), see [`SplitMix64::below`].
//! - Standard normals: Box–Muller on two fresh uniforms, cosine branch only.
//! - Substreams: a named substream for `(seed, name)` is a fresh generator
//!   seeded with the first 8 bytes (little-endian) of
//!   `SHA-256(seed as little-endian u64 ‖ name as UTF-8)`. Synthetic data
//!   generators draw each column from its own substream, so adding or
//!   reordering columns never perturbs the values of existing ones.

use sha2::{Digest, Sha256};

/// SplitMix64 pseudo-random generator. See the module docs for the exact
/// algorithm and the conventions built on top of it.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Generator seeded directly with `seed`.
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Named substream of `seed`: seeded with the first 8 bytes
    /// (little-endian) of `SHA-256(le64(seed) ‖ name)`.
    pub fn for_column(seed: u64, name: &str) -> Self {
        let mut h = Sha256::new();
        h.update(seed.to_le_bytes());
        h.update(name.as_bytes());
        let digest = h.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        SplitMix64::new(u64::from_le_bytes(bytes))
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform `f64` in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` by rejection sampling, so every value
    /// is exactly equally likely. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        // Reject raw outputs from the final partial copy of [0, bound) so
        // the remainder is unbiased.
        let threshold = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let r = self.next_u64();
            if r <= threshold {
                return r % bound;
            }
        }
    }

    /// Bernoulli draw with success probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal via Box–Muller (cosine branch), consuming exactly two
    /// uniforms per value.
    pub fn next_normal(&mut self) -> f64 {
        // 1 - u maps [0,1) onto (0,1], keeping ln() finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// In-place Fisher–Yates shuffle using [`Self::below`] for the index
    /// draws (iterating from the last element down to the second).
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
