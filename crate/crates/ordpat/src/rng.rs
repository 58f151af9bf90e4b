//! Pinned pseudo-random generation: splitmix64 plus xoshiro256++.
//!
//! Both algorithms are implemented here with their published constants so
//! that every seeded run is bit-identical across platforms and releases.
//! Uniform doubles are produced as `(x >> 11) * 2^-53`, giving values in
//! `[0, 1)` with 53 random mantissa bits.
//!
//! Independent streams: stream `k` of user seed `s` is a xoshiro256++
//! generator state-filled (by its own splitmix64 seeding rule) from the
//! `(k+1)`-th output of a splitmix64 sequence started at `s`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64: 64-bit state, one output per step.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }
}

fn mix(z: u64) -> u64 {
    let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `k`-th output (0-based) of a splitmix64 sequence seeded with `seed`,
/// in constant time.
pub fn splitmix64_nth(seed: u64, k: u64) -> u64 {
    mix(seed.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// xoshiro256++ with 256-bit state.
#[derive(Clone, Debug)]
pub struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    /// State-fills from four successive splitmix64 outputs of `seed`.
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        let s = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        Xoshiro256PlusPlus { s }
    }

    /// Stream `index` for `seed`; independent streams for distinct indices.
    pub fn stream(seed: u64, index: u64) -> Self {
        Self::seed_from_u64(splitmix64_nth(seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform double in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_vector() {
        let mut sm = SplitMix64::new(0);
        assert_eq!(sm.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(sm.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(sm.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn splitmix_nth_matches_stream() {
        let mut sm = SplitMix64::new(42);
        for k in 0..5 {
            assert_eq!(splitmix64_nth(42, k), sm.next_u64());
        }
        assert_eq!(splitmix64_nth(42, 0), 13679457532755275413);
    }

    #[test]
    fn xoshiro_vector() {
        let mut x = Xoshiro256PlusPlus::seed_from_u64(42);
        assert_eq!(x.next_u64(), 15021278609987233951);
        assert_eq!(x.next_u64(), 5881210131331364753);
        assert_eq!(x.next_u64(), 18149643915985481100);
        assert_eq!(x.next_u64(), 12933668939759105464);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut x = Xoshiro256PlusPlus::seed_from_u64(42);
        let u = x.next_f64();
        assert!((0.0..1.0).contains(&u));
        assert_eq!(u, 0.8143051451229099);
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let mut a0 = Xoshiro256PlusPlus::stream(7, 0);
        let mut a1 = Xoshiro256PlusPlus::stream(7, 1);
        let mut b0 = Xoshiro256PlusPlus::stream(7, 0);
        let x0 = a0.next_u64();
        assert_ne!(x0, a1.next_u64());
        assert_eq!(x0, b0.next_u64());
    }
}
