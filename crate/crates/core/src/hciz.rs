//! Itzykson-Zuber type integrals over U(N) and U(n1, n2): determinant
//! kernels, Weyl sums, Haar Monte Carlo, disk quadrature and the diffusion
//! kernel on the Cartan subalgebra.

use std::f64::consts::PI;

use serde::Serialize;

use crate::calibration;
use crate::error::{Error, Result};
use crate::kahler::{rho_matrix, CosetSpace};
use crate::linalg::{permutations, vandermonde, ComplexMatrix, C64, I};
use crate::mc::{self, MCEstimate};
use crate::quad::{composite_legendre, trapezoid_periodic};
use crate::rng::RngStream;

pub const DEFAULT_MIN_GAP: f64 = 1e-8;
pub const MAX_WEYL_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HcizInput {
    pub x: Vec<C64>,
    pub y: Vec<C64>,
}

impl HcizInput {
    pub fn new(x: Vec<C64>, y: Vec<C64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::InvalidInput(format!(
                "x has {} entries, y has {}",
                x.len(),
                y.len()
            )));
        }
        Ok(Self { x, y })
    }

    pub fn real(x: &[f64], y: &[f64]) -> Result<Self> {
        Self::new(
            x.iter().map(|&v| C64::new(v, 0.0)).collect(),
            y.iter().map(|&v| C64::new(v, 0.0)).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn check_gaps(&self, min_gap: f64) -> Result<()> {
        for (name, v) in [("x", &self.x), ("y", &self.y)] {
            for i in 0..v.len() {
                for j in (i + 1)..v.len() {
                    let g = (v[i] - v[j]).norm();
                    if g < min_gap {
                        return Err(Error::Degenerate(format!(
                            "|{name}[{i}] - {name}[{j}]| = {g:.3e} below the gap tolerance {min_gap:.1e}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PseudoSignature {
    pub n1: usize,
    pub n2: usize,
}

impl PseudoSignature {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidInput(
                "signature blocks must be nonempty".into(),
            ));
        }
        Ok(Self { n1, n2 })
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// diag(+1 x n1, -1 x n2)
    pub fn lambda(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| if i < self.n1 { 1.0 } else { -1.0 })
            .collect()
    }

    pub fn blocks(&self) -> Vec<usize> {
        vec![self.n1, self.n2]
    }
}

/// Double divided differences of `exp(i x y)` over the nodes `x[0..=j]`,
/// `y[0..=m]`, as the matrix `G[j][m]`. Read off the first row of
/// `exp(i J_x (x) J_y)` with `J` the bidiagonal matrix of nodes and unit
/// superdiagonal, which stays accurate when nodes nearly coincide.
pub fn exp_divided_differences(x: &[C64], y: &[C64]) -> Result<ComplexMatrix> {
    let bidiag = |v: &[C64]| {
        let mut j = ComplexMatrix::diag(v);
        for k in 0..v.len().saturating_sub(1) {
            j[(k, k + 1)] = C64::new(1.0, 0.0);
        }
        j
    };
    let (jx, jy) = (bidiag(x), bidiag(y));
    let e = jx.kron(&jy).scale(I).expm()?;
    let ny = y.len();
    Ok(ComplexMatrix::from_fn(x.len(), ny, |j, m| {
        e[(0, j * ny + m)]
    }))
}

/// `det[exp(i x_l y_k)] / (Delta(x) Delta(y))` computed as `det G`.
fn kernel_ratio(x: &[C64], y: &[C64]) -> Result<C64> {
    exp_divided_differences(x, y)?.det()
}

/// Normalisation making the compact integral equal 1 at `X = 0`:
/// `prod_{p<N} p! * i^{-N(N-1)/2}`.
pub fn compact_constant(n: usize) -> C64 {
    let mut f = 1.0;
    let mut fact = 1.0;
    for p in 1..n {
        fact *= p as f64;
        f *= fact;
    }
    let k = (n * n.saturating_sub(1) / 2) % 4;
    C64::new(f, 0.0) * I.powi(-(k as i32))
}

/// `c_N det[exp(i x_l y_k)] / (Delta(X) Delta(Y))`, the normalised Haar average
/// of `exp(i Tr X U Y U^H)`.
pub fn hciz_compact_det(inp: &HcizInput) -> Result<C64> {
    hciz_compact_det_with_gap(inp, DEFAULT_MIN_GAP)
}

pub fn hciz_compact_det_with_gap(inp: &HcizInput, min_gap: f64) -> Result<C64> {
    inp.check_gaps(min_gap)?;
    Ok(compact_constant(inp.n()) * kernel_ratio(&inp.x, &inp.y)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PseudoResult {
    pub value: C64,
    /// Every mixed-block pairing has positive imaginary damping,
    /// `Im[(x_i - x_j)(y_i - y_j)] > 0` for `i` in block 1 and `j` in block 2.
    pub converges: bool,
}

/// `(-1)^{n1 n2} det[e^{i x y}]_{block 1} det[e^{i x y}]_{block 2} / (Delta(X) Delta(Y))`.
pub fn hciz_pseudo_det(inp: &HcizInput, sig: PseudoSignature) -> Result<PseudoResult> {
    if inp.n() != sig.n() {
        return Err(Error::InvalidInput(format!(
            "input length {} but signature ({}, {})",
            inp.n(),
            sig.n1,
            sig.n2
        )));
    }
    inp.check_gaps(DEFAULT_MIN_GAP)?;
    let n1 = sig.n1;
    let (x1, x2) = inp.x.split_at(n1);
    let (y1, y2) = inp.y.split_at(n1);
    let g1 = kernel_ratio(x1, y1)?;
    let g2 = kernel_ratio(x2, y2)?;
    let mut cross = C64::new(1.0, 0.0);
    let mut converges = true;
    for i in 0..n1 {
        for j in 0..sig.n2 {
            cross *= (x1[i] - x2[j]) * (y1[i] - y2[j]);
            if ((x1[i] - x2[j]) * (y1[i] - y2[j])).im <= 0.0 {
                converges = false;
            }
        }
    }
    let sign = if (n1 * sig.n2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(PseudoResult {
        value: g1 * g2 * sign / cross,
        converges,
    })
}

/// Signed sum over block-preserving permutations:
/// `sum_w (-1)^w exp(i sum_k x_k y_{w(k)}) / (Delta(X) Delta(Y))`.
pub fn weyl_sum(inp: &HcizInput, blocks: &[usize]) -> Result<C64> {
    let n = inp.n();
    if n > MAX_WEYL_SIZE {
        return Err(Error::TooLarge(format!(
            "Weyl sum over N = {n} (limit {MAX_WEYL_SIZE})"
        )));
    }
    if blocks.iter().sum::<usize>() != n || blocks.contains(&0) {
        return Err(Error::InvalidInput(format!(
            "blocks {blocks:?} do not partition {n} indices"
        )));
    }
    inp.check_gaps(DEFAULT_MIN_GAP)?;
    // Sum block by block: the group is a product, so the sum factorises.
    let mut total = C64::new(1.0, 0.0);
    let mut start = 0;
    for &b in blocks {
        let mut s = C64::new(0.0, 0.0);
        for p in permutations(b)? {
            let mut arg = C64::new(0.0, 0.0);
            for (k, &w) in p.image().iter().enumerate() {
                arg += inp.x[start + k] * inp.y[start + w];
            }
            s += (I * arg).exp() * p.parity() as f64;
        }
        total *= s;
        start += b;
    }
    Ok(total / (vandermonde(&inp.x) * vandermonde(&inp.y)))
}

/// Haar-distributed unitary: Gram-Schmidt (applied twice) on a complex
/// Ginibre matrix. The triangular factor has a positive real diagonal, which
/// is the phase fix that makes the law exactly Haar.
pub fn haar_unitary(n: usize, rng: &mut RngStream) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| C64::new(rng.normal(), rng.normal()))
                .collect()
        })
        .collect();
    for k in 0..n {
        for _ in 0..2 {
            for j in 0..k {
                let proj: C64 = (0..n).map(|i| cols[j][i].conj() * cols[k][i]).sum();
                for i in 0..n {
                    let v = cols[j][i];
                    cols[k][i] -= proj * v;
                }
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[k].iter_mut() {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Monte Carlo average of `exp(i Tr X U Y U^H)` over Haar `U`.
pub fn haar_mc_hciz(inp: &HcizInput, samples: usize, rng: &RngStream) -> Result<MCEstimate> {
    if samples < mc::BATCHES {
        return Err(Error::InvalidInput(format!(
            "need at least {} samples",
            mc::BATCHES
        )));
    }
    let n = inp.n();
    if inp.x.iter().all(|v| v.norm() == 0.0) || inp.y.iter().all(|v| v.norm() == 0.0) {
        return Ok(MCEstimate::exact(C64::new(1.0, 0.0), samples, rng.seed()));
    }
    Ok(mc::batched(samples, rng, |r| {
        let u = haar_unitary(n, r);
        let mut arg = C64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                arg += inp.x[a] * inp.y[b] * u[(a, b)].norm_sqr();
            }
        }
        (I * arg).exp()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskGrid {
    /// Radial nodes (rounded up to whole 8-point panels).
    pub radial: usize,
    pub angular: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self {
            radial: 400,
            angular: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskQuadrature {
    pub value: C64,
    pub measure_factor: C64,
    pub warnings: Vec<String>,
}

/// `x1 Tr Y - (x1 - x2) Tr(rho Y)`: the Hamiltonian `Tr(X g Y g^{-1})` of the
/// disk point `z`, written through its projection matrix.
pub fn disk_hamiltonian(inp: &HcizInput, z: C64) -> Result<C64> {
    let rho = rho_matrix(CosetSpace::NoncompactDisk, z)?;
    let (x1, x2) = (inp.x[0], inp.x[1]);
    let (y1, y2) = (inp.y[0], inp.y[1]);
    let tr_rho_y = rho[(0, 0)] * y1 + rho[(1, 1)] * y2;
    Ok(x1 * (y1 + y2) - (x1 - x2) * tr_rho_y)
}

/// Integral of `exp(i H)` over the disk against `c * dA / (pi (1 - r^2)^2)`,
/// with `c` the stored measure calibration factor.
///
/// Radial nodes are Gauss-Legendre panels uniform in `v = r^2 / (1 - r^2)`,
/// which clusters them near the boundary; `v` is truncated where the damping
/// `exp(-Im[(x1-x2)(y1-y2)] v)` reaches `e^{-38}`.
pub fn disk_quadrature_rank1(inp: &HcizInput, grid: DiskGrid) -> Result<DiskQuadrature> {
    let factor = calibration::get().disk_measure_factor();
    let (value, warnings) = disk_quadrature_raw(inp, grid)?;
    Ok(DiskQuadrature {
        value: value * factor,
        measure_factor: factor,
        warnings,
    })
}

/// Same integral with the positive density and no calibration factor.
pub fn disk_quadrature_raw(inp: &HcizInput, grid: DiskGrid) -> Result<(C64, Vec<String>)> {
    if inp.n() != 2 {
        return Err(Error::InvalidInput(
            "disk quadrature needs n1 = n2 = 1".into(),
        ));
    }
    let ab = (inp.x[0] - inp.x[1]) * (inp.y[0] - inp.y[1]);
    if ab.im <= 0.0 {
        return Err(Error::Divergent(format!(
            "Im[(x1-x2)(y1-y2)] = {} must be positive",
            ab.im
        )));
    }
    let order = 8;
    let panels = grid.radial.div_ceil(order).max(1);
    let vmax = 38.0 / ab.im;
    let mut warnings = Vec::new();
    let phase_per_panel = ab.re.abs() * vmax / panels as f64;
    if phase_per_panel > PI {
        warnings.push(format!(
            "radial grid coarse for |Re(ab)| = {:.3}: {:.2} rad per panel",
            ab.re.abs(),
            phase_per_panel
        ));
    }
    let radial = composite_legendre(0.0, vmax, panels, order);
    let ang = trapezoid_periodic(grid.angular);
    // dA / (pi (1 - r^2)^2) = dv dtheta / (2 pi)
    let mut total = C64::new(0.0, 0.0);
    for (&v, &wv) in radial.nodes.iter().zip(&radial.weights) {
        let r = (v / (1.0 + v)).sqrt();
        let mut ring = C64::new(0.0, 0.0);
        for (&th, &wt) in ang.nodes.iter().zip(&ang.weights) {
            let h = disk_hamiltonian(inp, C64::from_polar(r, th))?;
            ring += (I * h).exp() * wt;
        }
        total += ring * (wv / (2.0 * PI));
    }
    Ok((total, warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatKernelInput {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub t: f64,
}

pub const MAX_HEAT_SIZE: usize = 6;

/// `(2 pi t)^{-n/2} sum_{P in S_{n1} x S_{n2}} (-1)^P exp(-sum_i (alpha_i - beta_{P(i)})^2 / (2t))`.
pub fn heat_kernel(inp: &HeatKernelInput, sig: PseudoSignature) -> Result<f64> {
    let n = sig.n();
    if inp.alpha.len() != n || inp.beta.len() != n {
        return Err(Error::InvalidInput(
            "alpha and beta must have n1 + n2 entries".into(),
        ));
    }
    if n > MAX_HEAT_SIZE {
        return Err(Error::TooLarge(format!(
            "n1 + n2 = {n} (limit {MAX_HEAT_SIZE})"
        )));
    }
    if inp.t <= 0.0 || !inp.t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "t = {} must be positive",
            inp.t
        )));
    }
    let mut total = 1.0;
    let mut start = 0;
    for b in sig.blocks() {
        let mut s = 0.0;
        for p in permutations(b)? {
            let mut e = 0.0;
            for (k, &w) in p.image().iter().enumerate() {
                e += (inp.alpha[start + k] - inp.beta[start + w]).powi(2);
            }
            s += p.parity() as f64 * (-e / (2.0 * inp.t)).exp();
        }
        total *= s;
        start += b;
    }
    Ok(total * (2.0 * PI * inp.t).powf(-(n as f64) / 2.0))
}

/// `|d_t K - (1/2) sum_i d^2 K / d alpha_i^2|` by central differences with step `h`.
pub fn heat_residual(inp: &HeatKernelInput, sig: PseudoSignature, h: f64) -> Result<f64> {
    let k = |a: &[f64], t: f64| {
        heat_kernel(
            &HeatKernelInput {
                alpha: a.to_vec(),
                beta: inp.beta.clone(),
                t,
            },
            sig,
        )
    };
    let k0 = k(&inp.alpha, inp.t)?;
    let dt = (k(&inp.alpha, inp.t + h)? - k(&inp.alpha, inp.t - h)?) / (2.0 * h);
    let mut lap = 0.0;
    for i in 0..inp.alpha.len() {
        let mut p = inp.alpha.clone();
        p[i] += h;
        let mut m = inp.alpha.clone();
        m[i] -= h;
        lap += (k(&p, inp.t)? - 2.0 * k0 + k(&m, inp.t)?) / (h * h);
    }
    Ok((dt - 0.5 * lap).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn compact_two_by_two_closed_form() {
        let inp = HcizInput::real(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        let v = hciz_compact_det(&inp).unwrap();
        let expect = (I.exp() - 1.0) / I;
        assert!((v - expect).norm() < 1e-14, "{v}");
        assert!((v - c(0.841470984807897, 0.459697694131860)).norm() < 1e-12);
    }

    #[test]
    fn compact_normalisation_limit() {
        let e = 1e-6;
        let inp = HcizInput::real(&[e, 2.0 * e, 3.0 * e], &[0.3, -1.2, 2.0]).unwrap();
        let v = hciz_compact_det(&inp).unwrap();
        assert!((v - 1.0).norm() < 1e-4, "{v}");
    }

    #[test]
    fn compact_symmetric_under_swaps() {
        let a = HcizInput::real(&[0.3, 1.1, -0.7], &[0.5, -0.4, 0.9]).unwrap();
        let b = HcizInput::real(&[1.1, 0.3, -0.7], &[0.5, -0.4, 0.9]).unwrap();
        let (va, vb) = (hciz_compact_det(&a).unwrap(), hciz_compact_det(&b).unwrap());
        assert!((va - vb).norm() < 1e-13);
    }

    #[test]
    fn rejects_coincident_arguments() {
        let inp = HcizInput::real(&[0.3, 0.3], &[1.0, 0.0]).unwrap();
        assert!(matches!(hciz_compact_det(&inp), Err(Error::Degenerate(_))));
    }

    #[test]
    fn pseudo_rank_one_closed_form() {
        let sig = PseudoSignature::new(1, 1).unwrap();
        let inp = HcizInput::new(
            vec![c(0.0, 2.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let r = hciz_pseudo_det(&inp, sig).unwrap();
        assert!(r.converges);
        assert!(
            (r.value - c(0.0, (-2f64).exp() / 2.0)).norm() < 1e-14,
            "{}",
            r.value
        );
        let (a, b) = (c(0.4, 1.3), c(2.0, 0.1));
        let inp = HcizInput::new(vec![a, c(0.0, 0.0)], vec![b, c(0.0, 0.0)]).unwrap();
        let r = hciz_pseudo_det(&inp, sig).unwrap();
        assert!((r.value + (I * a * b).exp() / (a * b)).norm() < 1e-13);
    }

    #[test]
    fn weyl_single_permutation_blocks() {
        let inp = HcizInput::real(&[0.2, -0.9], &[1.3, 0.4]).unwrap();
        let w = weyl_sum(&inp, &[1, 1]).unwrap();
        let expect = (I * (0.2 * 1.3 - 0.9 * 0.4)).exp() / ((0.2 + 0.9) * (1.3 - 0.4));
        assert!((w - expect).norm() < 1e-14);
        let one = weyl_sum(&inp, &[2]).unwrap();
        assert!((one * compact_constant(2) - hciz_compact_det(&inp).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn weyl_matches_pseudo_with_sign() {
        let inp = HcizInput::new(
            vec![c(0.3, 0.1), c(-1.0, 0.4), c(1.7, -0.2)],
            vec![c(0.9, 0.0), c(-0.4, 0.3), c(0.2, 1.1)],
        )
        .unwrap();
        let sig = PseudoSignature::new(2, 1).unwrap();
        let w = weyl_sum(&inp, &sig.blocks()).unwrap();
        let p = hciz_pseudo_det(&inp, sig).unwrap().value;
        // (-1)^(n1 n2) = +1 for U(2,1).
        assert!((w - p).norm() < 1e-12 * p.norm(), "{w} {p}");
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = RngStream::new(3, 0);
        for n in [1, 2, 3, 6] {
            let u = haar_unitary(n, &mut rng);
            let d = u
                .adjoint()
                .matmul(&u)
                .sub(&ComplexMatrix::identity(n))
                .max_abs();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn haar_mc_trivial_and_two_by_two() {
        let zero = HcizInput::real(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        let e = haar_mc_hciz(&zero, 1000, &RngStream::new(1, 0)).unwrap();
        assert_eq!(e.mean, c(1.0, 0.0));
        assert_eq!(e.stderr(), 0.0);
        let inp = HcizInput::real(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        let e = haar_mc_hciz(&inp, 100_000, &RngStream::new(2, 0)).unwrap();
        assert!(e.agrees_with(hciz_compact_det(&inp).unwrap(), 3.0), "{e:?}");
    }

    #[test]
    fn disk_hamiltonian_closed_form() {
        let inp = HcizInput::new(
            vec![c(0.5, 2.0), c(0.1, 0.0)],
            vec![c(1.0, 0.3), c(-0.2, 0.0)],
        )
        .unwrap();
        let (a, b) = (inp.x[0] - inp.x[1], inp.y[0] - inp.y[1]);
        for z in [c(0.0, 0.0), c(0.3, -0.5), c(-0.7, 0.1)] {
            let r2 = z.norm_sqr();
            let h = disk_hamiltonian(&inp, z).unwrap();
            let expect = inp.x[0] * inp.y[0] + inp.x[1] * inp.y[1] + a * b * r2 / (1.0 - r2);
            assert!((h - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn disk_raw_integral_is_i_over_ab() {
        let inp = HcizInput::new(
            vec![c(0.0, 2.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let (v, w) = disk_quadrature_raw(&inp, DiskGrid::default()).unwrap();
        assert!(w.is_empty());
        let expect = (I * c(0.0, 2.0)).exp() * I / c(0.0, 2.0);
        assert!((v - expect).norm() < 1e-12 * expect.norm(), "{v}");
    }

    #[test]
    fn disk_refuses_divergent_input() {
        let inp = HcizInput::real(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(matches!(
            disk_quadrature_rank1(&inp, DiskGrid::default()),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn heat_kernel_block_antisymmetry_and_large_t() {
        let sig = PseudoSignature::new(2, 1).unwrap();
        let a = HeatKernelInput {
            alpha: vec![0.3, -0.5, 1.0],
            beta: vec![0.1, 0.7, -0.2],
            t: 0.5,
        };
        let b = HeatKernelInput {
            beta: vec![0.7, 0.1, -0.2],
            ..a.clone()
        };
        assert_eq!(
            heat_kernel(&a, sig).unwrap(),
            -heat_kernel(&b, sig).unwrap()
        );
        let big = HeatKernelInput {
            t: 1e12,
            ..a.clone()
        };
        let scaled = heat_kernel(&big, sig).unwrap() * (2.0 * PI * 1e12f64).powf(1.5);
        assert!(scaled.abs() < 1e-10);
        let r = heat_residual(&a, sig, 1e-3).unwrap();
        assert!(r <= 1e-4 * heat_kernel(&a, sig).unwrap().abs());
    }

    #[test]
    fn heat_kernel_symmetric_in_alpha_beta() {
        let sig = PseudoSignature::new(2, 2).unwrap();
        let a = HeatKernelInput {
            alpha: vec![0.3, -0.5, 1.0, 0.2],
            beta: vec![0.1, 0.7, -0.2, 1.4],
            t: 0.8,
        };
        let b = HeatKernelInput {
            alpha: a.beta.clone(),
            beta: a.alpha.clone(),
            t: 0.8,
        };
        let (ka, kb) = (heat_kernel(&a, sig).unwrap(), heat_kernel(&b, sig).unwrap());
        assert!((ka - kb).abs() < 1e-15 * ka.abs().max(1e-300));
    }
}
