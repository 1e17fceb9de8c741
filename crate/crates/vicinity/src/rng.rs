//! Deterministic, portable random number generation.
//!
//! Every randomized construction in this crate draws from [`SplitMix64`],
//! the 64-bit counter-based generator of Steele, Lea and Flood. The full
//! output sequence is pinned down here so that seeds reproduce across
//! implementations and platforms:
//!
//! * state update: `state += 0x9E3779B97F4A7C15` (wrapping)
//! * output: the new state passed through the murmur-style finalizer
//!   `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//!    z *= 0x94D049BB133111EB; z ^= z >> 31`
//! * [`SplitMix64::next_f64`]: `(next_u64() >> 11) * 2^-53`, uniform in `[0, 1)`
//! * [`SplitMix64::next_below`]`(n)`: mask `next_u64()` to the smallest
//!   all-ones mask covering `n - 1` and reject values `>= n`
//! * [`SplitMix64::bernoulli`]`(p)`: `next_f64() < p` (one draw per trial)
//!
//! The generator is seeded with the raw seed value; seed 0 produces the
//! reference sequence `e220a8397b1dcdaf, 6e789e6aa1b965f4, 06c45d188009454f, ...`.

/// SplitMix64 generator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` by masked rejection (unbiased).
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below(0)");
        let mask = if n.is_power_of_two() {
            n - 1
        } else {
            n.next_power_of_two() - 1
        };
        loop {
            let v = self.next_u64() & mask;
            if v < n {
                return v;
            }
        }
    }

    /// One Bernoulli trial; consumes exactly one `next_f64` draw.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

/// Derives an independent component seed from a build seed and a stream tag.
///
/// Composite builders (e.g. an oracle that samples landmarks and then builds
/// a sub-oracle) give each component its own stream so that the draws do not
/// interleave: `derive_seed(seed, tag) = SplitMix64::new(seed ^ tag * GAMMA).next_u64()`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    SplitMix64::new(seed ^ stream.wrapping_mul(GOLDEN_GAMMA)).next_u64()
}
