//! Deterministic random streams: xoshiro256++ seeded from a (seed, stream)
//! pair through SplitMix64.
//!
//! The construction is fixed and bit-exact across platforms: SplitMix64 is
//! stepped once from the seed, the stream index (offset by one and multiplied
//! by an odd 64-bit constant) is folded in, and four further SplitMix64
//! outputs fill the xoshiro256++ state.  Distinct stream ids therefore yield
//! fully decorrelated generators from a single user-facing seed, which is
//! what lets batches be assembled in parallel without losing determinism.

/// One random stream.  Never share a state between concurrent tasks; create
/// one per stream id instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngState {
    pub seed: u64,
    pub stream_id: u64,
    s: [u64; 4],
}

fn splitmix_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Builds the generator for `stream_id` under `seed`.
pub fn rng_stream(seed: u64, stream_id: u64) -> RngState {
    let mut sm = seed;
    let _ = splitmix_next(&mut sm);
    sm ^= stream_id.wrapping_add(1).wrapping_mul(0xD2B7_4407_B1CE_6E93);
    let mut s = [0u64; 4];
    for slot in &mut s {
        *slot = splitmix_next(&mut sm);
    }
    if s == [0; 4] {
        // xoshiro's state must not be all zero; unreachable in practice.
        s[0] = 0x9E37_79B9_7F4A_7C15;
    }
    RngState { seed, stream_id, s }
}

impl RngState {
    /// Next raw 64-bit output (xoshiro256++).
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform on (0, 1] with 53-bit resolution; never returns 0.0, so
    /// logarithms of the output are always finite.
    pub fn uniform(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0)
    }
}
