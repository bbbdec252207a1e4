//! Seedable counter-based random streams.
//!
//! Each stream is the SplitMix64 output function applied to an arithmetic
//! counter whose starting point is keyed by `(master_seed, stream_index)`.
//! Streams are reproducible bit-for-bit on one build; nothing here promises
//! agreement with other implementations.

use std::f64::consts::TAU;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    master_seed: u64,
    stream_index: u64,
    key: u64,
    counter: u64,
}

impl RandomSource {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let key = mix64(master_seed ^ mix64(stream_index.wrapping_add(GOLDEN)).rotate_left(17));
        Self {
            master_seed,
            stream_index,
            key,
            counter: 0,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Rewinds the stream to its first draw.
    pub fn reset(&mut self) {
        self.counter = 0;
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform on [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Fair coin as +1 / -1.
    #[inline]
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Two independent standard normal deviates (Box-Muller).
pub fn gaussian_pair(src: &mut RandomSource) -> (f64, f64) {
    // 1 - U lies in (0, 1], keeping the logarithm finite.
    let u1 = 1.0 - src.next_f64();
    let u2 = src.next_f64();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    (r * c, r * s)
}
