//! Seeded random streams.
//!
//! Every stochastic component draws from an [`RngStream`]. Streams are keyed
//! ChaCha8 generators, so a `(seed, key)` pair always replays the same
//! sequence and distinct keys under one seed never share output.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random stream with a recorded seed.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    key: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::keyed(seed, 0)
    }

    /// Independent stream `key` under `seed`.
    pub fn keyed(seed: u64, key: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(key);
        Self { seed, key, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Uniform draw from `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform draw from `[low, high]`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.unit()
    }

    pub fn fill_unit(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.unit();
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(rand_distr::StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Mixes a master seed with positional indices into a per-task seed.
///
/// The result depends only on the arguments, never on scheduling order, so
/// parallel and serial executions of the same task list agree.
pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    let mut h = splitmix64(master ^ 0xA076_1D64_78BD_642F);
    for &i in indices {
        h = splitmix64(h ^ splitmix64(i.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
