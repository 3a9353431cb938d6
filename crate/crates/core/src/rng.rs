use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// Seed of a reproducible random stream. Same seed, same stream, bit for bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    /// Seed of the `index`-th child stream. Children of distinct indices (and
    /// of distinct parents) are decorrelated by SplitMix64 mixing.
    pub fn child(self, index: u64) -> RngSeed {
        let base = splitmix64(self.0 ^ 0x6A09_E667_F3BC_C909);
        RngSeed(splitmix64(base.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1)))))
    }

    pub fn stream(self) -> StreamRng {
        StreamRng(ChaCha8Rng::seed_from_u64(self.0))
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}

/// Owned random stream handed to samplers.
#[derive(Clone, Debug)]
pub struct StreamRng(ChaCha8Rng);

impl StreamRng {
    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Unit-rate exponential.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        -libm::log(self.uniform_open())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Standard normal via Box-Muller (one draw per call).
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform_open();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RngSeed(42).stream();
        let mut b = RngSeed(42).stream();
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn children_differ() {
        let s = RngSeed(1);
        assert_ne!(s.child(0), s.child(1));
        assert_ne!(s.child(0), RngSeed(2).child(0));
        assert_eq!(s.child(7), s.child(7));
    }

    #[test]
    fn uniform_is_open() {
        let mut r = RngSeed(3).stream();
        for _ in 0..10_000 {
            let u = r.uniform_open();
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
