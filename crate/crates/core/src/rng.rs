//! Splitmix64 pseudo-random generator with the bounded draws used by the
//! instance generator.
//!
//! The raw stream is `rand_xoshiro`'s SplitMix64, whose recurrence is fixed
//! so generated instances can be reproduced bit for bit from any language:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out = z ^ (z >> 31)
//! ```
//!
//! Bounded draws use rejection sampling: a raw output `v` is accepted when
//! `v >= 2^64 mod s` and mapped to `v mod s`, where `s` is the range size.

use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    inner: rand_xoshiro::SplitMix64,
}

impl SplitMix64 {
    /// The seed is the initial state.
    pub fn new(seed: u64) -> Self {
        Self {
            inner: rand_xoshiro::SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, size)`. `size` must be positive.
    pub fn below(&mut self, size: u64) -> u64 {
        assert!(size > 0, "empty range");
        let threshold = size.wrapping_neg() % size;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % size;
            }
        }
    }

    /// Uniform integer in the closed range `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range [{lo}, {hi}]");
        let size = (hi as i128 - lo as i128 + 1) as u64;
        (lo as i128 + self.below(size) as i128) as i64
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Selects `k` distinct indices from `0..n` by a partial Fisher-Yates
    /// shuffle of the identity permutation.
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut idx: Vec<usize> = (0..n).collect();
        for t in 0..k {
            let j = t + self.below((n - t) as u64) as usize;
            idx.swap(t, j);
        }
        idx.truncate(k);
        idx
    }
}
