//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, scenario, purpose, sub, a, b)`,
//! so the outcome of one (cell, period) trial never depends on how many
//! other draws were made before it. That is what makes scenario generation
//! order- and thread-independent, and keeps each endogenous fire literally
//! independent of the others.

/// SplitMix64 output function.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent child seed for experiment `tag` under `seed`.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix(mix(seed) ^ tag.wrapping_mul(0xA24B_AED4_963E_E407))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    ExogenousIgnition,
    ExogenousSpread,
    Fault,
    EndogenousSpread,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::ExogenousIgnition => 0x11,
            Purpose::ExogenousSpread => 0x22,
            Purpose::Fault => 0x33,
            Purpose::EndogenousSpread => 0x44,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
    key: u64,
}

impl RngStream {
    /// Stream for scenario `stream` under `seed`, specialised to one purpose
    /// and sub-stream (e.g. the component whose fault seeds a fire).
    pub fn new(seed: u64, stream: u64, purpose: Purpose, sub: u64) -> Self {
        let key = mix(seed ^ mix(stream ^ mix(purpose.tag() ^ mix(sub))));
        RngStream { seed, stream, key }
    }

    /// Uniform draw in `[0, 1)` for counter `(a, b)`.
    #[inline]
    pub fn uniform(&self, a: u64, b: u64) -> f64 {
        let bits = mix(self.key ^ mix(a.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ mix(b)));
        (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&self, p: f64, a: u64, b: u64) -> bool {
        p >= 1.0 || (p > 0.0 && self.uniform(a, b) < p)
    }
}
