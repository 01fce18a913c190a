//! Large-N scaling limit of the correlator in the bulk of the spectrum,
//! with arguments `mu + omega / N`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inversion_parity, vandermonde_real, C64, I};
use crate::quad::composite_legendre;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingParams {
    pub mu: f64,
    pub omega_1b: Vec<C64>,
    pub omega_2b: Vec<C64>,
    pub omega_f: Vec<C64>,
}

impl ScalingParams {
    pub fn new(mu: f64, omega_1b: Vec<C64>, omega_2b: Vec<C64>, omega_f: Vec<C64>) -> Result<Self> {
        if mu.abs() >= 2.0 {
            return Err(Error::Domain(format!(
                "|mu| = {} is not inside the bulk (-2, 2)",
                mu.abs()
            )));
        }
        if omega_1b.len() != omega_2b.len() || !omega_f.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(
                "need n_B omegas in each bosonic block and 2 n_F fermionic".into(),
            ));
        }
        if omega_1b
            .iter()
            .chain(&omega_2b)
            .chain(&omega_f)
            .any(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite omega".into()));
        }
        Ok(Self {
            mu,
            omega_1b,
            omega_2b,
            omega_f,
        })
    }

    pub fn n_b(&self) -> usize {
        self.omega_1b.len()
    }

    pub fn n_f(&self) -> usize {
        self.omega_f.len() / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleValues {
    pub q_plus: C64,
    pub q_minus: C64,
}

/// `q_pm = (i mu +- sqrt(4 - mu^2)) / 2`, the stationary points of `q^2/2 - i mu q - ln q`.
pub fn saddle_points(mu: f64) -> Result<SaddleValues> {
    if mu.abs() >= 2.0 {
        return Err(Error::Domain(format!(
            "|mu| = {} reaches the spectral edge",
            mu.abs()
        )));
    }
    let r = (4.0 - mu * mu).sqrt();
    Ok(SaddleValues {
        q_plus: C64::new(r / 2.0, mu / 2.0),
        q_minus: C64::new(-r / 2.0, mu / 2.0),
    })
}

pub fn semicircle_density(mu: f64) -> Result<f64> {
    if mu.abs() >= 2.0 {
        return Err(Error::Domain(format!(
            "|mu| = {} reaches the spectral edge",
            mu.abs()
        )));
    }
    Ok((4.0 - mu * mu).sqrt() / (2.0 * PI))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Splitting {
    /// 0-based indices in increasing order.
    pub k_plus: Vec<usize>,
    pub k_minus: Vec<usize>,
    /// Parity of the rearrangement `(K+, K-)` of `0..2n_F`.
    pub sign: i8,
}

pub const MAX_SPLIT: usize = 6;

/// All ways of choosing `n_F` of the `2 n_F` fermionic indices.
pub fn enumerate_splittings(n_f: usize) -> Result<Vec<Splitting>> {
    if n_f > MAX_SPLIT {
        return Err(Error::TooLarge(format!("n_F = {n_f} (limit {MAX_SPLIT})")));
    }
    let total = 2 * n_f;
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << total) {
        if mask.count_ones() as usize != n_f {
            continue;
        }
        let k_plus: Vec<usize> = (0..total).filter(|i| mask & (1 << i) != 0).collect();
        let k_minus: Vec<usize> = (0..total).filter(|i| mask & (1 << i) == 0).collect();
        let arrangement: Vec<usize> = k_plus.iter().chain(&k_minus).copied().collect();
        out.push(Splitting {
            sign: inversion_parity(&arrangement),
            k_plus,
            k_minus,
        });
    }
    Ok(out)
}

/// Index range of the bosonic denominator of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum BosonDenominator {
    /// `prod_{l1 < l2} (omega_1B[l1] - omega_2B[l2])`; empty at `n_B = 1`.
    #[default]
    Printed,
    /// `prod_{l1, l2} (omega_1B[l1] - omega_2B[l2])`.
    AllPairs,
}

fn nonzero(v: C64, what: &str) -> Result<C64> {
    if v.norm() < 1e-300 {
        Err(Error::Degenerate(format!("coincident omegas in {what}")))
    } else {
        Ok(v)
    }
}

/// `prod_l [prod_{K+} (w_F - w_1B) prod_{K-} (w_F - w_2B)] / [B-denominator * prod_{K-, K+} (w_F[k1] - w_F[k2])]`.
pub fn f_factor(s: &Splitting, p: &ScalingParams, denom: BosonDenominator) -> Result<C64> {
    let mut num = C64::new(1.0, 0.0);
    for l in 0..p.n_b() {
        for &k in &s.k_plus {
            num *= p.omega_f[k] - p.omega_1b[l];
        }
        for &k in &s.k_minus {
            num *= p.omega_f[k] - p.omega_2b[l];
        }
    }
    let mut den = C64::new(1.0, 0.0);
    for l1 in 0..p.n_b() {
        for l2 in 0..p.n_b() {
            let take = match denom {
                BosonDenominator::Printed => l1 < l2,
                BosonDenominator::AllPairs => true,
            };
            if take {
                den *= nonzero(p.omega_1b[l1] - p.omega_2b[l2], "the bosonic denominator")?;
            }
        }
    }
    for &k1 in &s.k_minus {
        for &k2 in &s.k_plus {
            den *= nonzero(p.omega_f[k1] - p.omega_f[k2], "the fermionic denominator")?;
        }
    }
    Ok(num / den)
}

/// `C = (2 pi)^{n_B} (-1)^{N n_B + n_F^2 - n_F + n_B^2/2 + n_B + n_B n_F}`, with
/// `(-1)^x = e^{i pi x}` for half-integer `x`.
pub fn overall_constant(n: usize, n_b: usize, n_f: usize) -> C64 {
    let (nb, nfm) = (n_b as f64, n_f as f64);
    let x = (n as f64) * nb + nfm * nfm - nfm + nb * nb / 2.0 + nb + nb * nfm;
    C64::from_polar((2.0 * PI).powf(nb), PI * x.rem_euclid(2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticOptions {
    pub denominator: BosonDenominator,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        Self {
            denominator: BosonDenominator::Printed,
        }
    }
}

/// Splitting sum `sum_{K+} F e^{i q+ [sum w_1B - sum_{K-} w_F] + i q- [sum w_2B - sum_{K+} w_F]}`.
pub fn splitting_sum(p: &ScalingParams, denom: BosonDenominator) -> Result<C64> {
    let sv = saddle_points(p.mu)?;
    let s1: C64 = p.omega_1b.iter().sum();
    let s2: C64 = p.omega_2b.iter().sum();
    let mut total = C64::new(0.0, 0.0);
    for s in enumerate_splittings(p.n_f())? {
        let f = f_factor(&s, p, denom)?;
        let minus: C64 = s.k_minus.iter().map(|&k| p.omega_f[k]).sum();
        let plus: C64 = s.k_plus.iter().map(|&k| p.omega_f[k]).sum();
        total += f * (I * sv.q_plus * (s1 - minus) + I * sv.q_minus * (s2 - plus)).exp();
    }
    Ok(total)
}

/// `C e^{N (n_F - n_B) mu^2 / 2} * splitting_sum`.
pub fn asymptotic_correlator(p: &ScalingParams, n: usize, opts: &AsymptoticOptions) -> Result<C64> {
    let (n_b, n_f) = (p.n_b(), p.n_f());
    let c = overall_constant(n, n_b, n_f);
    let growth = (n as f64 * (n_f as f64 - n_b as f64) * p.mu * p.mu / 2.0).exp();
    Ok(c * growth * splitting_sum(p, opts.denominator)?)
}

/// Spectral arguments `mu + omega / N` for the finite-N correlator, with the
/// fermionic ones returned as rotated variables `i (mu + omega_F / N)`.
pub fn finite_n_arguments(p: &ScalingParams, n: usize) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    let nf = n as f64;
    let m = |w: &C64| C64::new(p.mu, 0.0) + w / nf;
    (
        p.omega_1b.iter().map(m).collect(),
        p.omega_2b.iter().map(m).collect(),
        p.omega_f.iter().map(|w| I * m(w)).collect(),
    )
}

pub const MAX_GAUSSIAN_M: usize = 4;

/// `int dTheta Delta(Theta) e^{-(t/2) Tr Theta^2 + i Tr(Theta Omega)}`
/// `= (-1)^{m(m-1)/4} (2 pi)^{m/2} t^{-m^2/2} Delta(Omega) e^{-Tr Omega^2 / (2t)}`,
/// with `(-1)^x = e^{i pi x}`.
pub fn gaussian_matrix_integral(m: usize, t: f64, omega: &[f64]) -> Result<C64> {
    if m == 0 || m > MAX_GAUSSIAN_M || omega.len() != m {
        return Err(Error::InvalidInput(format!(
            "need 1 <= m <= {MAX_GAUSSIAN_M} and m omegas"
        )));
    }
    if t <= 0.0 {
        return Err(Error::InvalidInput("t must be positive".into()));
    }
    let mf = m as f64;
    let phase = C64::from_polar(1.0, PI * mf * (mf - 1.0) / 4.0);
    let tr: f64 = omega.iter().map(|w| w * w).sum();
    let mag = (2.0 * PI).powf(mf / 2.0)
        * t.powf(-mf * mf / 2.0)
        * vandermonde_real(omega)
        * (-tr / (2.0 * t)).exp();
    Ok(phase * mag)
}

/// Direct tensor quadrature of the `m = 2` eigenvalue integral
/// `int dtheta1 dtheta2 (theta1 - theta2) e^{-(t/2)(th1^2 + th2^2) + i (th1 w1 + th2 w2)}`.
pub fn gaussian_eigen_integral_m2(t: f64, omega: [f64; 2]) -> C64 {
    let l = 12.0 / t.sqrt();
    let r = composite_legendre(-l, l, 24, 16);
    let mut s = C64::new(0.0, 0.0);
    for (&a, &wa) in r.nodes.iter().zip(&r.weights) {
        for (&b, &wb) in r.nodes.iter().zip(&r.weights) {
            let e = C64::new(-0.5 * t * (a * a + b * b), a * omega[0] + b * omega[1]);
            s += e.exp() * ((a - b) * wa * wb);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn saddle_examples_and_invariants() {
        let s = saddle_points(0.0).unwrap();
        assert_eq!((s.q_plus, s.q_minus), (c(1.0, 0.0), c(-1.0, 0.0)));
        assert!((semicircle_density(0.0).unwrap() - 1.0 / PI).abs() < 1e-16);
        let s = saddle_points(1.0).unwrap();
        assert!((s.q_plus - c(3f64.sqrt() / 2.0, 0.5)).norm() < 1e-15);
        for mu in [-1.9, -1.0, 0.0, 0.3, 1.5] {
            let s = saddle_points(mu).unwrap();
            assert!((s.q_plus * s.q_minus + 1.0).norm() < 1e-14);
            assert!((s.q_plus + s.q_minus - I * mu).norm() < 1e-14);
            let half = 0.5 * (s.q_plus * s.q_plus + s.q_minus * s.q_minus);
            assert!((half - (1.0 - mu * mu / 2.0)).norm() < 1e-14);
            for q in [s.q_plus, s.q_minus] {
                assert!((q - I * mu - 1.0 / q).norm() < 1e-14);
            }
        }
        assert!(saddle_points(2.0).is_err());
    }

    #[test]
    fn splitting_counts() {
        assert_eq!(enumerate_splittings(1).unwrap().len(), 2);
        assert_eq!(enumerate_splittings(2).unwrap().len(), 6);
        assert_eq!(enumerate_splittings(3).unwrap().len(), 20);
        let s1 = enumerate_splittings(1).unwrap();
        // {0}|{1} is the identity, {1}|{0} a transposition.
        let total: i32 = s1.iter().map(|s| s.sign as i32).sum();
        assert_eq!(total, 0);
        assert!(enumerate_splittings(7).is_err());
    }

    #[test]
    fn f_factor_examples() {
        let p = ScalingParams::new(0.0, vec![], vec![], vec![c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let s = &enumerate_splittings(1).unwrap()[0];
        assert_eq!(s.k_plus, vec![0]);
        let f = f_factor(s, &p, BosonDenominator::Printed).unwrap();
        assert!((f - 1.0 / (p.omega_f[1] - p.omega_f[0])).norm() < 1e-15);
        let pb = ScalingParams::new(0.0, vec![c(0.0, 1.0)], vec![c(0.0, -1.0)], vec![]).unwrap();
        let s0 = &enumerate_splittings(0).unwrap()[0];
        assert_eq!(
            f_factor(s0, &pb, BosonDenominator::Printed).unwrap(),
            c(1.0, 0.0)
        );
        let alt = f_factor(s0, &pb, BosonDenominator::AllPairs).unwrap();
        assert!((alt - 1.0 / c(0.0, 2.0)).norm() < 1e-15);
        let pbf = ScalingParams::new(
            0.0,
            vec![c(0.0, 1.0)],
            vec![c(0.0, -1.0)],
            vec![c(0.5, 0.0), c(-0.5, 0.0)],
        )
        .unwrap();
        let f = f_factor(s, &pbf, BosonDenominator::Printed).unwrap();
        let expect = (pbf.omega_f[0] - c(0.0, 1.0)) * (pbf.omega_f[1] - c(0.0, -1.0))
            / (pbf.omega_f[1] - pbf.omega_f[0]);
        assert!((f - expect).norm() < 1e-15);
    }

    #[test]
    fn degenerate_omegas_rejected() {
        let p = ScalingParams::new(0.0, vec![], vec![], vec![c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(splitting_sum(&p, BosonDenominator::Printed).is_err());
    }

    #[test]
    fn empty_correlator_is_constant() {
        let p = ScalingParams::new(0.3, vec![], vec![], vec![]).unwrap();
        assert_eq!(
            asymptotic_correlator(&p, 10, &AsymptoticOptions::default()).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn splitting_sum_symmetric_under_fermion_relabeling() {
        let w = vec![c(0.5, 0.1), c(-0.3, 0.0), c(0.9, -0.2), c(-1.1, 0.05)];
        let mut v = w.clone();
        v.swap(0, 3);
        v.swap(1, 2);
        let a = ScalingParams::new(0.4, vec![c(0.2, 1.0)], vec![c(0.1, -0.8)], w).unwrap();
        let b = ScalingParams {
            omega_f: v,
            ..a.clone()
        };
        let sa = splitting_sum(&a, BosonDenominator::Printed).unwrap();
        let sb = splitting_sum(&b, BosonDenominator::Printed).unwrap();
        assert!((sa - sb).norm() < 1e-12 * sa.norm());
    }

    #[test]
    fn two_point_fermionic_kernel_is_sine() {
        let p = ScalingParams::new(0.0, vec![], vec![], vec![c(0.7, 0.0), c(-0.2, 0.0)]).unwrap();
        let s = splitting_sum(&p, BosonDenominator::Printed).unwrap();
        let d: f64 = 0.9;
        assert!((s - c(0.0, -2.0 * d.sin() / d)).norm() < 1e-14, "{s}");
    }

    #[test]
    fn gaussian_integral_examples() {
        let v = gaussian_matrix_integral(1, 2.0, &[0.7]).unwrap();
        assert!((v - (PI).sqrt() * (-0.49f64 / 4.0).exp()).norm() < 1e-14);
        assert_eq!(
            gaussian_matrix_integral(2, 1.0, &[0.0, 0.0])
                .unwrap()
                .norm(),
            0.0
        );
        let closed = gaussian_matrix_integral(2, 1.0, &[1.0, -1.0]).unwrap();
        let quad = gaussian_eigen_integral_m2(1.0, [1.0, -1.0]);
        // (-1)^{1/2} read as i.
        assert!(
            (closed - quad).norm() < 1e-8 * closed.norm(),
            "{closed} vs {quad}"
        );
    }
}
