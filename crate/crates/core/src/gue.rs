//! GUE sampling with density proportional to exp(-N/2 Tr H^2), and Monte Carlo
//! estimates of characteristic-polynomial correlators.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigvals_tridiagonal, ComplexMatrix, HermitianMatrix, LogValue, Spectrum, C64};
use crate::mc::{self, MCEstimate};
use crate::rng::RngStream;

/// Arguments of the correlator
/// `< prod_k Z(nu_k) / prod_l Z(mu_1B[l]) Z(mu_2B[l]) >`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralParams {
    pub mu_1b: Vec<C64>,
    pub mu_2b: Vec<C64>,
    pub mu_f: Vec<C64>,
    /// When set, the numerator is evaluated at `-i * mu_f`.
    pub rotated_fermionic: bool,
}

impl SpectralParams {
    pub fn new(
        mu_1b: Vec<C64>,
        mu_2b: Vec<C64>,
        mu_f: Vec<C64>,
        rotated_fermionic: bool,
    ) -> Result<Self> {
        if mu_1b.len() != mu_2b.len() {
            return Err(Error::InvalidInput(format!(
                "mu_1B has {} entries, mu_2B has {}",
                mu_1b.len(),
                mu_2b.len()
            )));
        }
        if !mu_f.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "mu_F must have an even number of entries".into(),
            ));
        }
        let p = Self {
            mu_1b,
            mu_2b,
            mu_f,
            rotated_fermionic,
        };
        p.check_signs()?;
        Ok(p)
    }

    pub fn empty() -> Self {
        Self {
            mu_1b: vec![],
            mu_2b: vec![],
            mu_f: vec![],
            rotated_fermionic: false,
        }
    }

    pub fn n_b(&self) -> usize {
        self.mu_1b.len()
    }

    pub fn n_f(&self) -> usize {
        self.mu_f.len() / 2
    }

    fn check_signs(&self) -> Result<()> {
        for (l, (a, b)) in self.mu_1b.iter().zip(&self.mu_2b).enumerate() {
            if !(a.im > 0.0 && b.im < 0.0) {
                return Err(Error::Domain(format!(
                    "need Im mu_1B > 0 and Im mu_2B < 0, got {a} and {b} at l={l}"
                )));
            }
        }
        Ok(())
    }

    /// Points at which the numerator polynomials are evaluated.
    pub fn fermionic_points(&self) -> Vec<C64> {
        if self.rotated_fermionic {
            self.mu_f.iter().map(|m| C64::new(0.0, -1.0) * m).collect()
        } else {
            self.mu_f.clone()
        }
    }

    /// Smallest |Im mu_B|, or infinity without bosonic factors.
    pub fn min_bosonic_damping(&self) -> f64 {
        self.mu_1b
            .iter()
            .chain(&self.mu_2b)
            .map(|m| m.im.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// GUE matrix: diagonal entries N(0, 1/N), real and imaginary parts of the
/// upper triangle N(0, 1/(2N)).
pub fn sample_gue(n: usize, rng: &mut RngStream) -> HermitianMatrix {
    assert!(n >= 1);
    let sd_diag = (1.0 / n as f64).sqrt();
    let sd_off = (0.5 / n as f64).sqrt();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(sd_diag * rng.normal(), 0.0);
        for j in (i + 1)..n {
            let z = C64::new(sd_off * rng.normal(), sd_off * rng.normal());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::from_trusted(m)
}

/// log Z(mu) = sum_i log(mu - lambda_i).
pub fn char_poly_log(spec: &Spectrum, mu: C64) -> LogValue {
    let mut ln_abs = 0.0;
    let mut phase = C64::new(1.0, 0.0);
    for &l in spec.values() {
        let f = mu - l;
        let a = f.norm();
        if a == 0.0 {
            return LogValue {
                ln_abs: f64::NEG_INFINITY,
                phase: C64::new(1.0, 0.0),
            };
        }
        ln_abs += a.ln();
        phase *= f / a;
        phase /= phase.norm();
    }
    LogValue { ln_abs, phase }
}

/// Correlator value for one spectrum.
pub fn correlator_sample(spec: &Spectrum, fermionic: &[C64], params: &SpectralParams) -> C64 {
    let mut acc = LogValue::ONE;
    for &nu in fermionic {
        acc = acc.mul(char_poly_log(spec, nu));
    }
    for (&a, &b) in params.mu_1b.iter().zip(&params.mu_2b) {
        acc = acc.div(char_poly_log(spec, a));
        acc = acc.div(char_poly_log(spec, b));
    }
    acc.to_complex()
}

pub const MIN_SAMPLES: usize = 100;

pub fn correlator_mc(
    params: &SpectralParams,
    n: usize,
    samples: usize,
    rng: &RngStream,
) -> Result<MCEstimate> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix size must be positive".into()));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    params.check_signs()?;
    if params.n_b() == 0 && params.n_f() == 0 {
        return Ok(MCEstimate::exact(C64::new(1.0, 0.0), samples, rng.seed()));
    }
    let fermionic = params.fermionic_points();
    Ok(mc::batched(samples, rng, |r| {
        let h = sample_gue(n, r);
        let spec = eigvals_tridiagonal(&h).expect("tridiagonal QL converges on GUE samples");
        correlator_sample(&spec, &fermionic, params)
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Counts divided by (in-range total x bin width); integrates to 1.
    pub density: Vec<f64>,
    pub in_range: u64,
    pub out_of_range: u64,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.width()
    }

    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }

    /// Largest |density - bin-averaged semicircle| over bins inside [a, b].
    pub fn semicircle_distance(&self, a: f64, b: f64) -> f64 {
        let w = self.width();
        let mut worst: f64 = 0.0;
        for (k, d) in self.density.iter().enumerate() {
            let l = self.lo + k as f64 * w;
            let r = l + w;
            if l >= a - 1e-12 && r <= b + 1e-12 {
                let avg = (semicircle_cdf(r) - semicircle_cdf(l)) / w;
                worst = worst.max((d - avg).abs());
            }
        }
        worst
    }
}

pub const HISTOGRAM_RANGE: (f64, f64) = (-2.5, 2.5);

pub fn spectral_histogram(
    n: usize,
    samples: usize,
    bins: usize,
    rng: &RngStream,
) -> Result<Histogram> {
    if bins < 10 {
        return Err(Error::InvalidInput(format!(
            "need at least 10 bins, got {bins}"
        )));
    }
    if samples == 0 || n == 0 {
        return Err(Error::InvalidInput("samples and N must be positive".into()));
    }
    let (lo, hi) = HISTOGRAM_RANGE;
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut out = 0u64;
    let mut r = rng.clone();
    for _ in 0..samples {
        let h = sample_gue(n, &mut r);
        let spec = eigvals_tridiagonal(&h)?;
        for &x in spec.values() {
            if x < lo || x >= hi {
                out += 1;
            } else {
                let k = (((x - lo) / w) as usize).min(bins - 1);
                counts[k] += 1;
            }
        }
    }
    let in_range: u64 = counts.iter().sum();
    let density = counts
        .iter()
        .map(|&c| c as f64 / (in_range as f64 * w))
        .collect();
    Ok(Histogram {
        lo,
        hi,
        counts,
        density,
        in_range,
        out_of_range: out,
    })
}

/// Semicircle density sqrt(4 - x^2) / (2 pi) on [-2, 2].
pub fn semicircle(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

pub fn semicircle_cdf(x: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
}
