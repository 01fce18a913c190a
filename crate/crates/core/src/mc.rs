//! Batched Monte Carlo driver with batch-means standard errors.

use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::C64;
use crate::rng::RngStream;

pub const BATCHES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: C64,
    pub stderr_real: f64,
    pub stderr_imag: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MCEstimate {
    pub fn exact(value: C64, samples: usize, seed: u64) -> Self {
        Self {
            mean: value,
            stderr_real: 0.0,
            stderr_imag: 0.0,
            samples,
            seed,
        }
    }

    /// Combined standard error sqrt(se_re^2 + se_im^2).
    pub fn stderr(&self) -> f64 {
        self.stderr_real.hypot(self.stderr_imag)
    }

    /// Distance to `value` in units of the combined standard error.
    pub fn sigmas_from(&self, value: C64) -> f64 {
        let d = (self.mean - value).norm();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr()
        }
    }

    pub fn agrees_with(&self, value: C64, k: f64) -> bool {
        (self.mean - value).norm() <= k * self.stderr()
    }
}

/// Runs `samples` draws of `f` split into [`BATCHES`] batches. Batch `b` draws
/// from `rng.substream(b)`; batch sums are merged in batch order, so the result
/// depends only on `(seed, stream id, samples)` and not on the thread count.
pub fn batched<F>(samples: usize, rng: &RngStream, f: F) -> MCEstimate
where
    F: Fn(&mut RngStream) -> C64 + Sync,
{
    assert!(samples >= BATCHES, "need at least {BATCHES} samples");
    let base = samples / BATCHES;
    let extra = samples % BATCHES;
    let sums: Vec<(C64, usize)> = (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let count = base + usize::from(b < extra);
            let mut r = rng.substream(b as u64);
            let mut s = C64::new(0.0, 0.0);
            for _ in 0..count {
                s += f(&mut r);
            }
            (s, count)
        })
        .collect();
    let total: C64 = sums.iter().map(|(s, _)| *s).sum();
    let mean = total / samples as f64;
    let means: Vec<C64> = sums.iter().map(|(s, c)| s / *c as f64).collect();
    let mb: C64 = means.iter().sum::<C64>() / BATCHES as f64;
    let (mut vr, mut vi) = (0.0, 0.0);
    for m in &means {
        vr += (m.re - mb.re).powi(2);
        vi += (m.im - mb.im).powi(2);
    }
    let denom = (BATCHES * (BATCHES - 1)) as f64;
    MCEstimate {
        mean,
        stderr_real: (vr / denom).sqrt(),
        stderr_imag: (vi / denom).sqrt(),
        samples,
        seed: rng.seed(),
    }
}

/// Real-valued variant returning (mean, batch-means stderr).
pub fn batched_real<F>(samples: usize, rng: &RngStream, f: F) -> (f64, f64)
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let est = batched(samples, rng, |r| C64::new(f(r), 0.0));
    (est.mean.re, est.stderr_real)
}
