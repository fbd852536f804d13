//! Minimal deterministic pseudo-random numbers.
//!
//! Everything in this crate that needs randomness (chaos game, synthetic
//! rasters, sampled grid statistics, randomized tests) draws from SplitMix64
//! so that a run is reproducible from a single `u64` seed, independent of
//! platform and of any external crate's stream evolution. The algorithm is
//! Steele, Lea and Flood's published generator: a 64-bit Weyl sequence with
//! increment 0x9E3779B97F4A7C15 whose output is finalized by two xor-shift
//! multiplies (constants 0xBF58476D1CE4E5B9, 0x94D049BB133111EB).

/// SplitMix64 stream. `Clone` gives cheap stream forks for tests.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` using the top 53 bits, so every value is an exact
    /// multiple of 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` by scaling; adequate for small `n`.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let i = (self.next_f64() * n as f64) as usize;
        i.min(n - 1)
    }
}
