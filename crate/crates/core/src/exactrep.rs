//! Exact finite-N eigenvalue-integral representation of the correlator,
//! its normalisation constant, and the Gram-matrix change of variables.
//!
//! The representation integrates over `2 n_F` real variables `q` and two
//! sets of `n_B` positive variables `p1`, `p2`:
//!
//! `K_N(mu_B, -i mu_F) = C / (Delta(mu_F) Delta(mu_B)) * int Delta(q) (det q)^{N-2n_B}
//!   e^{-N/2 sum (mu_F - q)^2} Delta(p1) Delta(p2) prod(p1 + p2) e^{-N/2 (p1^2 + p2^2)}
//!   e^{iN sum (mu_1B p1 - mu_2B p2)} (det p1 p2)^{N-2n_B} prod_k det(q_k - p1) det(q_k + p2)`.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::calibration;
use crate::error::{Error, Result};
use crate::gue::{correlator_mc, SpectralParams};
use crate::linalg::{
    eigh_jacobi, vandermonde, vandermonde_real, ComplexMatrix, HermitianMatrix, LogValue, C64, I,
};
use crate::mc::{self, MCEstimate};
use crate::quad::{composite_legendre, gauss_hermite};
use crate::rng::RngStream;

pub const MAX_BLOCK: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseSource {
    /// Integer sign exponent, taken as printed.
    Printed,
    /// Half-integer sign exponent, phase taken from the calibration file.
    Calibrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConstant {
    pub ln_abs: f64,
    /// `N(n_B + n_F) - n_B(n_B/2 - 1)`.
    pub sign_exponent: f64,
    pub phase: C64,
    pub source: PhaseSource,
}

impl NormConstant {
    pub fn value(&self) -> C64 {
        self.phase * self.ln_abs.exp()
    }
}

fn check_sizes(n: usize, n_b: usize, n_f: usize) -> Result<()> {
    if n_b > MAX_BLOCK || n_f > MAX_BLOCK {
        return Err(Error::TooLarge(format!(
            "n_B = {n_b}, n_F = {n_f} (limit {MAX_BLOCK})"
        )));
    }
    if n < 2 * n_b || n == 0 {
        return Err(Error::InvalidInput(format!(
            "need N >= 2 n_B, got N = {n}, n_B = {n_b}"
        )));
    }
    Ok(())
}

/// `ln |C|` with `|C| = N^{2n_B(N-n_B)+n_B+n_F} / ((2 pi)^{n_F} prod_{k=1}^{2n_B} Gamma(N-k+1))`.
pub fn norm_constant_ln_abs(n: usize, n_b: usize, n_f: usize) -> f64 {
    let nf = n as f64;
    let e = 2.0 * n_b as f64 * (nf - n_b as f64) + n_b as f64 + n_f as f64;
    let mut out = e * nf.ln() - n_f as f64 * (2.0 * PI).ln();
    for k in 1..=(2 * n_b) {
        out -= ln_gamma(nf - k as f64 + 1.0);
    }
    out
}

pub fn norm_constant(n: usize, n_b: usize, n_f: usize) -> Result<NormConstant> {
    check_sizes(n, n_b, n_f)?;
    let nb = n_b as f64;
    let sign_exponent = (n * (n_b + n_f)) as f64 - nb * (nb / 2.0 - 1.0);
    let ln_abs = norm_constant_ln_abs(n, n_b, n_f);
    if sign_exponent.fract() == 0.0 {
        let phase = if (sign_exponent as i64).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        return Ok(NormConstant {
            ln_abs,
            sign_exponent,
            phase: C64::new(phase, 0.0),
            source: PhaseSource::Printed,
        });
    }
    let phase = calibration::get().phase(n, n_b, n_f).ok_or_else(|| {
        Error::Unsupported(format!(
            "no calibrated phase for N mod 2 = {}, n_B = {n_b}, n_F = {n_f}; run `rmtlab calibrate`",
            n % 2
        ))
    })?;
    Ok(NormConstant {
        ln_abs,
        sign_exponent,
        phase,
        source: PhaseSource::Calibrated,
    })
}

/// Pointwise integrand (without the prefactor).
pub fn integrand_kk3(
    q: &[f64],
    p1: &[f64],
    p2: &[f64],
    params: &SpectralParams,
    n: usize,
) -> Result<C64> {
    let (n_b, n_f) = (params.n_b(), params.n_f());
    check_sizes(n, n_b, n_f)?;
    if q.len() != 2 * n_f || p1.len() != n_b || p2.len() != n_b {
        return Err(Error::InvalidInput(
            "integration variables do not match n_B, n_F".into(),
        ));
    }
    let nf = n as f64;
    let pow = (n - 2 * n_b) as i32;
    let mut v = LogValue::ONE;
    // fermionic block
    v = v.mul_complex(C64::new(vandermonde_real(q), 0.0));
    let mut gauss = C64::new(0.0, 0.0);
    for (k, &qk) in q.iter().enumerate() {
        v = v.mul(LogValue::from_complex(C64::new(qk, 0.0)).powi(pow));
        gauss += (params.mu_f[k] - qk).powi(2);
    }
    // bosonic block
    v = v.mul_complex(C64::new(vandermonde_real(p1) * vandermonde_real(p2), 0.0));
    for &a in p1 {
        for &b in p2 {
            v = v.mul_complex(C64::new(a + b, 0.0));
        }
    }
    let mut expo = -0.5 * nf * gauss;
    for l in 0..n_b {
        expo += C64::new(-0.5 * nf * (p1[l] * p1[l] + p2[l] * p2[l]), 0.0);
        expo += I * nf * (params.mu_1b[l] * p1[l] - params.mu_2b[l] * p2[l]);
        v = v.mul(LogValue::from_complex(C64::new(p1[l] * p2[l], 0.0)).powi(pow));
    }
    for &qk in q {
        for l in 0..n_b {
            v = v.mul_complex(C64::new((qk - p1[l]) * (qk + p2[l]), 0.0));
        }
    }
    v = v.mul(LogValue {
        ln_abs: expo.re,
        phase: C64::from_polar(1.0, expo.im),
    });
    Ok(v.to_complex())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSpec {
    /// Gauss-Legendre panels on the positive half-line for each p axis.
    pub p_panels: usize,
    pub p_order: usize,
    /// Gauss-Hermite nodes per q axis; `None` picks the exact count for the polynomial degree.
    pub q_nodes: Option<usize>,
    /// Relative tolerance on the doubling error estimate.
    pub tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            p_panels: 24,
            p_order: 16,
            q_nodes: None,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactRepParams {
    pub n: usize,
    /// `rotated_fermionic` must be set: the result is `K_N(mu_B, -i mu_F)`.
    pub spectral: SpectralParams,
    pub quadrature: QuadSpec,
}

impl ExactRepParams {
    pub fn new(n: usize, spectral: SpectralParams) -> Result<Self> {
        if !spectral.rotated_fermionic {
            return Err(Error::InvalidInput(
                "the exact representation takes rotated fermionic arguments".into(),
            ));
        }
        check_sizes(n, spectral.n_b(), spectral.n_f())?;
        Ok(Self {
            n,
            spectral,
            quadrature: QuadSpec::default(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub value: C64,
    pub error_estimate: f64,
    pub converged: bool,
    pub phase_source: PhaseSource,
}

/// Moments `int_0^inf p^{N-2} e^{-N p^2/2 + i N s mu p} p^j dp`, `j = 0..=jmax`,
/// scaled by `e^{-shift}`; returns (moments, shift).
fn p_moments(
    n: usize,
    mu: C64,
    sign: f64,
    jmax: usize,
    panels: usize,
    order: usize,
) -> (Vec<C64>, f64) {
    let nf = n as f64;
    let pow = (n - 2) as f64;
    let damp = nf * sign * mu.im;
    // ln|weight| = pow ln p - N p^2 / 2 - damp p; damp > 0 by the half-plane condition.
    let lw = |p: f64| if p == 0.0 { if pow == 0.0 { 0.0 } else { f64::NEG_INFINITY } } else { pow * p.ln() } - 0.5 * nf * p * p - damp * p;
    let mut peak = f64::NEG_INFINITY;
    let mut p = 1e-3;
    while p < 60.0 {
        peak = peak.max(lw(p));
        p += 1e-3;
    }
    let peak = peak.max(lw(0.0));
    let mut cut = 1.0f64.max((pow / nf).sqrt());
    while lw(cut) + (jmax as f64) * cut.ln().max(0.0) > peak - 50.0 {
        cut += 0.05;
    }
    let rule = composite_legendre(0.0, cut, panels, order);
    let mut m = vec![C64::new(0.0, 0.0); jmax + 1];
    for (&p, &w) in rule.nodes.iter().zip(&rule.weights) {
        let l = lw(p) - peak;
        if l < -745.0 {
            continue;
        }
        let f = w * l.exp() * C64::from_polar(1.0, nf * sign * mu.re * p);
        let mut pj = 1.0;
        for mj in m.iter_mut() {
            *mj += f * pj;
            pj *= p;
        }
    }
    (m, peak)
}

/// Coefficients of `prod_k (a_k + s x)` in powers of `x`.
fn poly_from_roots(a: &[C64], s: f64) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for &ak in a {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci * ak;
            next[i + 1] += ci * s;
        }
        c = next;
    }
    c
}

/// Unnormalised integral and its log scale, for fixed rule sizes.
fn integrate(params: &ExactRepParams, p_panels: usize, q_nodes: usize) -> (C64, f64) {
    let n = params.n;
    let sp = &params.spectral;
    let (n_b, n_f) = (sp.n_b(), sp.n_f());
    let nf = n as f64;
    let pow = (n - 2 * n_b) as i32;
    let order = params.quadrature.p_order;
    let moments = if n_b == 1 {
        let jmax = 2 * n_f + 1;
        let (m1, s1) = p_moments(n, sp.mu_1b[0], 1.0, jmax, p_panels, order);
        let (m2, s2) = p_moments(n, sp.mu_2b[0], -1.0, jmax, p_panels, order);
        Some((m1, m2, s1 + s2))
    } else {
        None
    };
    let p_scale = moments.as_ref().map_or(0.0, |m| m.2);
    let p_part = |q: &[C64]| -> C64 {
        match &moments {
            None => C64::new(1.0, 0.0),
            Some((m1, m2, _)) => {
                let a = poly_from_roots(q, -1.0);
                let b = poly_from_roots(q, 1.0);
                let mut s = C64::new(0.0, 0.0);
                for (j, aj) in a.iter().enumerate() {
                    for (l, bl) in b.iter().enumerate() {
                        s += aj * bl * (m1[j + 1] * m2[l] + m1[j] * m2[l + 1]);
                    }
                }
                s
            }
        }
    };
    if n_f == 0 {
        return (p_part(&[]), p_scale);
    }
    let gh = gauss_hermite(q_nodes);
    let h = (2.0 / nf).sqrt();
    let dims = 2 * n_f;
    let axes: Vec<Vec<(C64, f64)>> = (0..dims)
        .map(|k| {
            gh.nodes
                .iter()
                .zip(&gh.weights)
                .map(|(&x, &w)| (sp.mu_f[k] + h * x, w * h))
                .collect()
        })
        .collect();
    // Terms are rescaled by the largest |q|^{pow * dims} to keep the sum in range.
    let qmax = axes
        .iter()
        .flatten()
        .map(|(q, _)| q.norm())
        .fold(1.0, f64::max);
    let q_shift = pow as f64 * dims as f64 * qmax.ln();
    let mut idx = vec![0usize; dims];
    let mut total = C64::new(0.0, 0.0);
    let mut q = vec![C64::new(0.0, 0.0); dims];
    loop {
        let mut w = 1.0;
        let mut prod = C64::new(1.0, 0.0);
        for k in 0..dims {
            let (qk, wk) = axes[k][idx[k]];
            q[k] = qk;
            w *= wk;
            prod *= qk / qmax;
        }
        total += vandermonde(&q) * prod.powi(pow) * p_part(&q) * w;
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < q_nodes {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == dims {
                return (total, p_scale + q_shift);
            }
        }
    }
}

fn prefactor_denominator(sp: &SpectralParams) -> C64 {
    let mut mb = sp.mu_1b.clone();
    mb.extend(&sp.mu_2b);
    vandermonde(&sp.mu_f) * vandermonde(&mb)
}

/// Exact-representation value with a unit phase on the constant.
fn correlator_exact_unphased(params: &ExactRepParams) -> Result<(C64, f64, bool)> {
    let sp = &params.spectral;
    let (n_b, n_f) = (sp.n_b(), sp.n_f());
    check_sizes(params.n, n_b, n_f)?;
    if n_b > 1 {
        return Err(Error::Unsupported(
            "exact quadrature implemented for n_B <= 1".into(),
        ));
    }
    if n_b == 0 && n_f == 0 {
        return Ok((C64::new(1.0, 0.0), 0.0, true));
    }
    let den = prefactor_denominator(sp);
    if den.norm() == 0.0 {
        return Err(Error::Degenerate("coincident spectral arguments".into()));
    }
    let qd = &params.quadrature;
    let q_exact = (params.n + 2 * n_f).div_ceil(2) + 2;
    let q_nodes = qd.q_nodes.unwrap_or(q_exact);
    let ln_c = norm_constant_ln_abs(params.n, n_b, n_f);
    let eval = |panels: usize, qn: usize| {
        let (s, shift) = integrate(params, panels, qn);
        s * (ln_c + shift).exp() / den
    };
    let coarse = eval(qd.p_panels, q_nodes);
    let fine = eval(2 * qd.p_panels, q_nodes + 4);
    let err = (fine - coarse).norm();
    let converged =
        err <= qd.tol * fine.norm().max(1e-300) && fine.re.is_finite() && fine.im.is_finite();
    Ok((fine, err, converged))
}

/// Nested quadrature of the exact representation, including the normalisation
/// and its calibrated phase.
pub fn correlator_exact(params: &ExactRepParams) -> Result<ExactResult> {
    let (n_b, n_f) = (params.spectral.n_b(), params.spectral.n_f());
    if n_b == 0 && n_f == 0 {
        return Ok(ExactResult {
            value: C64::new(1.0, 0.0),
            error_estimate: 0.0,
            converged: true,
            phase_source: PhaseSource::Printed,
        });
    }
    let c = norm_constant(params.n, n_b, n_f)?;
    let (v, err, converged) = correlator_exact_unphased(params)?;
    Ok(ExactResult {
        value: v * c.phase,
        error_estimate: err,
        converged,
        phase_source: c.source,
    })
}

/// Large-argument limit `(-1)^{N n_F} prod_k mu_F^N / prod_l (mu_1B mu_2B)^N`.
pub fn decoupling_limit(params: &ExactRepParams) -> C64 {
    let n = params.n as i32;
    let sp = &params.spectral;
    let mut v = if (params.n * sp.n_f()).is_multiple_of(2) {
        C64::new(1.0, 0.0)
    } else {
        C64::new(-1.0, 0.0)
    };
    for m in &sp.mu_f {
        v *= m.powi(n);
    }
    for (a, b) in sp.mu_1b.iter().zip(&sp.mu_2b) {
        v /= (a * b).powi(n);
    }
    v
}

/// Spectral point used to calibrate the phase of a `(N mod 2, n_B, n_F)` cell.
pub fn calibration_point(n_b: usize, n_f: usize) -> Result<SpectralParams> {
    let f = [0.2, -0.4, 0.5, -0.1];
    SpectralParams::new(
        vec![C64::new(0.3, 1.0); n_b],
        vec![C64::new(-0.1, -1.0); n_b],
        f[..2 * n_f].iter().map(|&v| C64::new(v, 0.0)).collect(),
        true,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCalibration {
    pub n: usize,
    pub n_b: usize,
    pub n_f: usize,
    pub mc: MCEstimate,
    pub exact_unphased: C64,
    /// `mc / exact_unphased`; modulus near 1 when the magnitude of the constant is right.
    pub ratio: C64,
    /// Nearest fourth root of unity to `ratio`.
    pub phase: C64,
}

/// Matches Monte Carlo against the unit-phase exact value and rounds the
/// ratio to the nearest fourth root of unity.
pub fn calibrate_phase(
    n: usize,
    n_b: usize,
    n_f: usize,
    samples: usize,
    seed: u64,
) -> Result<PhaseCalibration> {
    let sp = calibration_point(n_b, n_f)?;
    let params = ExactRepParams::new(n, sp.clone())?;
    let (exact, _, _) = correlator_exact_unphased(&params)?;
    let mc = correlator_mc(
        &sp,
        n,
        samples,
        &RngStream::new(seed, (n * 100 + n_b * 10 + n_f) as u64),
    )?;
    let ratio = mc.mean / exact;
    let k = (ratio.arg() / (PI / 2.0)).round() as i32;
    let phase = I.powi(k.rem_euclid(4));
    Ok(PhaseCalibration {
        n,
        n_b,
        n_f,
        mc,
        exact_unphased: exact,
        ratio,
        phase,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremOneInstance {
    pub n: usize,
    pub m: usize,
    pub field: FieldKind,
}

impl TheoremOneInstance {
    pub fn new(n: usize, m: usize, field: FieldKind) -> Result<Self> {
        let ok = m >= 1
            && match field {
                FieldKind::Real => n > m,
                FieldKind::Complex => n >= m,
            };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "need N > m (real) or N >= m (complex), got N={n}, m={m}"
            )));
        }
        Ok(Self { n, m, field })
    }
}

/// Constant relating the integral over `m` vectors in `F^N` to the integral over
/// Gram matrices: `(2pi)^{Nm - m(m-1)/2} / prod_{k=1}^m (N-k)!` (complex),
/// `pi^{(m/2)(N - (m-1)/2)} / prod_{k=0}^{m-1} Gamma((N-k)/2)` (real).
pub fn theorem1_constant(inst: &TheoremOneInstance) -> f64 {
    ln_theorem1_constant(inst).exp()
}

fn ln_theorem1_constant(inst: &TheoremOneInstance) -> f64 {
    let (n, m) = (inst.n as f64, inst.m as f64);
    match inst.field {
        FieldKind::Complex => {
            let mut v = (n * m - m * (m - 1.0) / 2.0) * (2.0 * PI).ln();
            for k in 1..=inst.m {
                v -= ln_gamma(n - k as f64 + 1.0);
            }
            v
        }
        FieldKind::Real => {
            let mut v = (m / 2.0) * (n - (m - 1.0) / 2.0) * PI.ln();
            for k in 0..inst.m {
                v -= ln_gamma((n - k as f64) / 2.0);
            }
            v
        }
    }
}

/// Off-diagonal Hermitian measure `dQ_ij dQbar_ij = 2 dRe dIm`, matching the
/// vector-side convention `dz dzbar = 2 dRe dIm`.
pub const COMPLEX_PAIR_MEASURE: f64 = 2.0;

/// `ln int_{Q > 0} det(Q)^{a - m} e^{-Tr Q} dQ` over complex Hermitian `m x m`
/// matrices, with the pair measure above.
pub fn ln_multigamma_complex(a: f64, m: usize) -> f64 {
    let mf = m as f64;
    let mut v = mf * (mf - 1.0) / 2.0 * (PI * COMPLEX_PAIR_MEASURE).ln();
    for k in 0..m {
        v += ln_gamma(a - k as f64);
    }
    v
}

/// `ln int_{Q > 0} det(Q)^{a - (m+1)/2} e^{-Tr Q} dQ` over real symmetric `m x m` matrices.
pub fn ln_multigamma_real(a: f64, m: usize) -> f64 {
    let mf = m as f64;
    let mut v = mf * (mf - 1.0) / 4.0 * PI.ln();
    for k in 0..m {
        v += ln_gamma(a - k as f64 / 2.0);
    }
    v
}

/// Both sides of the change of variables for `F(Q) = e^{-Tr Q}`.
/// Left: the Gaussian integral over `m` vectors (`e^{-|z|^2}` per coordinate,
/// `dz dzbar = 2 dRe dIm`). Right: constant times the Gram-matrix integral.
pub fn theorem1_check_gaussian(inst: &TheoremOneInstance) -> (f64, f64) {
    let (n, m) = (inst.n as f64, inst.m);
    let mf = m as f64;
    match inst.field {
        FieldKind::Complex => {
            let lhs = n * mf * (2.0 * PI).ln();
            let rhs = ln_theorem1_constant(inst) + ln_multigamma_complex(n, m);
            (lhs.exp(), rhs.exp())
        }
        FieldKind::Real => {
            let lhs = n * mf / 2.0 * PI.ln();
            let rhs = ln_theorem1_constant(inst) + ln_multigamma_real(n / 2.0, m);
            (lhs.exp(), rhs.exp())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WishartReport {
    pub trace: (f64, f64),
    pub trace_expected: f64,
    pub det: (f64, f64),
    pub det_expected: f64,
    pub all_psd: bool,
}

impl WishartReport {
    pub fn within(&self, k: f64) -> bool {
        (self.trace.0 - self.trace_expected).abs() <= k * self.trace.1
            && (self.det.0 - self.det_expected).abs() <= k * self.det.1
            && self.all_psd
    }
}

/// Gram matrices of `m` Gaussian vectors in `F^N` with density `e^{-|z|^2}`
/// per coordinate, i.e. `E|z|^2 = 1` (complex) or `E x^2 = 1/2` (real).
pub fn wishart_mc_check(
    inst: &TheoremOneInstance,
    samples: usize,
    rng: &RngStream,
) -> Result<WishartReport> {
    if samples < 10_000 {
        return Err(Error::InvalidInput(format!(
            "need at least 10^4 samples, got {samples}"
        )));
    }
    let (n, m) = (inst.n, inst.m);
    let sd = (0.5f64).sqrt();
    let draw = |r: &mut RngStream| -> ComplexMatrix {
        let z = ComplexMatrix::from_fn(n, m, |_, _| match inst.field {
            FieldKind::Complex => C64::new(sd * r.normal(), sd * r.normal()),
            FieldKind::Real => C64::new(sd * r.normal(), 0.0),
        });
        z.adjoint().matmul(&z)
    };
    // Each estimator replays the same draws; the two moments come from the same Gram matrices.
    let psd = std::sync::atomic::AtomicBool::new(true);
    let tr = mc::batched_real(samples, rng, |r| {
        let q = draw(r);
        let h = HermitianMatrix::new(q.clone()).map(|h| eigh_jacobi(&h));
        match h {
            Ok(Ok(e)) if e.spectrum.values()[0] >= -1e-12 * q.max_abs().max(1.0) => {}
            _ => psd.store(false, std::sync::atomic::Ordering::Relaxed),
        }
        q.trace().re
    });
    let det = mc::batched_real(samples, rng, |r| draw(r).det().expect("square").re);
    let falling: f64 = (0..m).map(|k| (n - k) as f64).product();
    let (trace_expected, det_expected) = match inst.field {
        FieldKind::Complex => ((n * m) as f64, falling),
        FieldKind::Real => ((n * m) as f64 / 2.0, falling * 0.5f64.powi(m as i32)),
    };
    Ok(WishartReport {
        trace: tr,
        trace_expected,
        det,
        det_expected,
        all_psd: psd.into_inner(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn norm_constant_examples() {
        let k = norm_constant(5, 2, 0).unwrap();
        assert_eq!(k.sign_exponent, 10.0);
        assert_eq!(k.source, PhaseSource::Printed);
        let expect = 5f64.powi(14) / 288.0;
        assert!((k.value() - expect).norm() < 1e-9 * expect);
        for n in [4, 5] {
            let k = norm_constant(n, 0, 1).unwrap();
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((k.value() - c(s * n as f64 / (2.0 * PI), 0.0)).norm() < 1e-14);
        }
        let k = norm_constant(6, 1, 0).unwrap();
        assert_eq!(k.source, PhaseSource::Calibrated);
        assert!(norm_constant(3, 2, 0).is_err());
    }

    #[test]
    fn integrand_reduces_without_bosons() {
        let sp =
            SpectralParams::new(vec![], vec![], vec![c(0.2, 0.0), c(-0.3, 0.0)], true).unwrap();
        let q = [0.7, -1.1];
        let v = integrand_kk3(&q, &[], &[], &sp, 5).unwrap();
        let expect = (0.7 + 1.1)
            * (0.7f64 * -1.1).powi(5)
            * (-2.5 * ((0.2f64 - 0.7).powi(2) + (-0.3f64 + 1.1).powi(2))).exp();
        assert!((v - expect).norm() < 1e-14 * expect.abs());
        let swapped = integrand_kk3(&[-1.1, 0.7], &[], &[], &sp, 5).unwrap();
        let sp2 =
            SpectralParams::new(vec![], vec![], vec![c(-0.3, 0.0), c(0.2, 0.0)], true).unwrap();
        let v2 = integrand_kk3(&[-1.1, 0.7], &[], &[], &sp2, 5).unwrap();
        assert!((v2 + v).norm() < 1e-14 * v.norm());
        assert!((swapped - v).norm() > 0.0);
    }

    #[test]
    fn integrand_without_fermions_has_no_q_part() {
        let sp = SpectralParams::new(vec![c(0.3, 1.0)], vec![c(-0.1, -1.0)], vec![], true).unwrap();
        let v = integrand_kk3(&[], &[0.8], &[1.1], &sp, 4).unwrap();
        let expo = C64::new(-2.0 * (0.64 + 1.21), 0.0)
            + I * 4.0 * (c(0.3, 1.0) * 0.8 - c(-0.1, -1.0) * 1.1);
        let expect = expo.exp() * 1.9 * (0.8f64 * 1.1).powi(2);
        assert!((v - expect).norm() < 1e-13 * expect.norm());
    }

    #[test]
    fn empty_correlator_is_one() {
        let p = ExactRepParams::new(
            4,
            SpectralParams {
                rotated_fermionic: true,
                ..SpectralParams::empty()
            },
        )
        .unwrap();
        assert_eq!(correlator_exact(&p).unwrap().value, c(1.0, 0.0));
    }

    #[test]
    fn quadrature_matches_brute_force_integrand() {
        // Unnormalised integral for n_B = n_F = 1 against a plain tensor rule on the pointwise integrand.
        let sp = SpectralParams::new(
            vec![c(0.3, 1.0)],
            vec![c(-0.1, -1.0)],
            vec![c(0.2, 0.0), c(-0.4, 0.0)],
            true,
        )
        .unwrap();
        let n = 4;
        let params = ExactRepParams::new(n, sp.clone()).unwrap();
        let (s, shift) = integrate(&params, 24, 8);
        let fast = s * shift.exp();
        let p = composite_legendre(0.0, 7.0, 8, 8);
        let q = composite_legendre(-6.0, 6.0, 10, 8);
        let mut brute = c(0.0, 0.0);
        for (&q1, &w1) in q.nodes.iter().zip(&q.weights) {
            for (&q2, &w2) in q.nodes.iter().zip(&q.weights) {
                for (&a, &wa) in p.nodes.iter().zip(&p.weights) {
                    for (&b, &wb) in p.nodes.iter().zip(&p.weights) {
                        brute += integrand_kk3(&[q1, q2], &[a], &[b], &sp, n).unwrap()
                            * (w1 * w2 * wa * wb);
                    }
                }
            }
        }
        assert!(
            (fast - brute).norm() < 1e-8 * brute.norm(),
            "{fast} vs {brute}"
        );
    }

    #[test]
    fn theorem1_constant_examples() {
        for n in [3, 4, 7] {
            let r = theorem1_constant(&TheoremOneInstance::new(n, 1, FieldKind::Real).unwrap());
            let expect = PI.powf(n as f64 / 2.0) / ln_gamma(n as f64 / 2.0).exp();
            assert!((r - expect).abs() < 1e-12 * expect);
        }
        let cc = theorem1_constant(&TheoremOneInstance::new(3, 1, FieldKind::Complex).unwrap());
        assert!((cc - (2.0 * PI).powi(3) / 2.0).abs() < 1e-10);
        let r4 = theorem1_constant(&TheoremOneInstance::new(4, 1, FieldKind::Real).unwrap());
        assert!((r4 - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn multigamma_m1_is_gamma() {
        for n in 1..8 {
            let v = ln_multigamma_complex(n as f64, 1);
            assert!((v - ln_gamma(n as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_identity_small_instances() {
        for (n, m, f) in [
            (3, 1, FieldKind::Complex),
            (4, 2, FieldKind::Complex),
            (5, 2, FieldKind::Real),
        ] {
            let (l, r) = theorem1_check_gaussian(&TheoremOneInstance::new(n, m, f).unwrap());
            assert!((l - r).abs() <= 1e-10 * l, "{n} {m} {f:?}: {l} vs {r}");
        }
    }

    #[test]
    fn wishart_m1_trace_is_n() {
        let inst = TheoremOneInstance::new(5, 1, FieldKind::Complex).unwrap();
        let r = wishart_mc_check(&inst, 20_000, &RngStream::new(4, 0)).unwrap();
        assert_eq!(r.trace_expected, 5.0);
        assert!(r.within(3.0), "{r:?}");
    }
}
