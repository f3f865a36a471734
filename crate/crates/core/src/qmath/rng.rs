//! Seeded randomness.
//!
//! `Rng` wraps ChaCha8, whose output is fully specified by its key and
//! therefore identical on every platform. Independent substreams are derived
//! by mixing the parent seed with an index (SplitMix64 finaliser), so each
//! Monte Carlo trial can own its generator and results do not depend on the
//! order in which trials are evaluated.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = seed;
        for chunk in key.chunks_mut(8) {
            s = splitmix(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        Rng { seed, inner: ChaCha8Rng::from_seed(key) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for task `index`; depends only on the parent seed.
    pub fn substream(&self, index: u64) -> Rng {
        Rng::new(splitmix(self.seed ^ splitmix(index.wrapping_add(0xA5A5_A5A5))))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}
