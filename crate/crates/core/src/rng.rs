//! Seeded random streams.
//!
//! Every stream is a ChaCha20 generator keyed by the 64-bit seed, with the
//! stream id selecting one of 2^64 independent keystreams. Output depends
//! only on `(seed, stream_id)`, on every platform.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream `k` of this stream. Children of distinct parents or with
    /// distinct `k` never share a keystream as long as parent ids stay below 2^40.
    pub fn substream(&self, k: u64) -> Self {
        Self::new(self.seed, ((self.stream_id + 1) << 24) | (k & 0xff_ffff))
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
