//! Rank-1 Kahler cosets: the sphere U(2)/T in the chart z (CP1) and the
//! disk U(1,1)/T. Potentials, projection matrices, momentum maps, the group
//! action, and localization checks.
//!
//! Momentum maps are `T_a = -Tr(rho tau_a)` with the generators
//! `tau_h = diag(1, -1)`, `tau_q = [[0, 1], [0, 0]]`, `tau_{-q} = [[0, 0], [-1, 0]]`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, I};
use crate::quad::{composite_legendre, gauss_legendre, trapezoid_periodic};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CosetSpace {
    CompactCp1,
    NoncompactDisk,
}

impl CosetSpace {
    pub fn name(&self) -> &'static str {
        match self {
            CosetSpace::CompactCp1 => "cp1",
            CosetSpace::NoncompactDisk => "disk",
        }
    }

    /// +1 for CP1, -1 for the disk.
    fn sign(&self) -> f64 {
        match self {
            CosetSpace::CompactCp1 => 1.0,
            CosetSpace::NoncompactDisk => -1.0,
        }
    }

    pub fn check(&self, z: C64) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("non-finite point {z}")));
        }
        if *self == CosetSpace::NoncompactDisk && z.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "|z| = {} is outside the unit disk",
                z.norm()
            )));
        }
        Ok(())
    }
}

impl std::str::FromStr for CosetSpace {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cp1" | "compact" => Ok(CosetSpace::CompactCp1),
            "disk" | "noncompact" => Ok(CosetSpace::NoncompactDisk),
            _ => Err(Error::InvalidInput(format!(
                "unknown space {s:?} (cp1 | disk)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumTriple {
    pub t_q: C64,
    pub t_minus_q: C64,
    pub t_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Generator {
    H,
    Q,
    MinusQ,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::H, Generator::Q, Generator::MinusQ];

    /// 2x2 matrix as [[a, b], [c, d]].
    pub fn matrix(&self) -> [C64; 4] {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        match self {
            Generator::H => [o, z, z, -o],
            Generator::Q => [z, o, z, z],
            Generator::MinusQ => [z, z, -o, z],
        }
    }
}

pub fn kahler_potential(space: CosetSpace, z: C64) -> Result<f64> {
    space.check(z)?;
    Ok((1.0 + space.sign() * z.norm_sqr()).ln())
}

/// Density of the invariant form against dx dy, positive on both spaces and
/// normalised to total mass 1 on CP1.
pub fn metric_density(space: CosetSpace, z: C64) -> Result<f64> {
    space.check(z)?;
    let d = 1.0 + space.sign() * z.norm_sqr();
    Ok(1.0 / (PI * d * d))
}

/// Coefficient `omega` of `dz ^ dzbar` in `-(1/(2 pi i)) d dbar K`.
pub fn form_coefficient(space: CosetSpace, z: C64) -> Result<C64> {
    space.check(z)?;
    let d = 1.0 + space.sign() * z.norm_sqr();
    Ok(I * space.sign() / (2.0 * PI * d * d))
}

pub fn rho_matrix(space: CosetSpace, z: C64) -> Result<ComplexMatrix> {
    space.check(z)?;
    let r2 = z.norm_sqr();
    let o = C64::new(1.0, 0.0);
    let m = match space {
        CosetSpace::CompactCp1 => {
            let s = 1.0 / (1.0 + r2);
            vec![o * r2 * s, z * s, z.conj() * s, o * s]
        }
        CosetSpace::NoncompactDisk => {
            let s = 1.0 / (r2 - 1.0);
            vec![o * r2 * s, -z * s, z.conj() * s, -o * s]
        }
    };
    ComplexMatrix::from_rows(2, 2, m)
}

pub fn momentum_map(space: CosetSpace, z: C64, a: Generator) -> Result<C64> {
    let rho = rho_matrix(space, z)?;
    let t = a.matrix();
    let tau = ComplexMatrix::from_rows(2, 2, t.to_vec())?;
    Ok(-rho.matmul(&tau).trace())
}

pub fn momentum_maps(space: CosetSpace, z: C64) -> Result<MomentumTriple> {
    Ok(MomentumTriple {
        t_q: momentum_map(space, z, Generator::Q)?,
        t_minus_q: momentum_map(space, z, Generator::MinusQ)?,
        t_h: momentum_map(space, z, Generator::H)?.re,
    })
}

/// Closed forms of the momentum maps, used as an independent check of `momentum_maps`.
pub fn momentum_maps_closed_form(space: CosetSpace, z: C64) -> Result<MomentumTriple> {
    space.check(z)?;
    let r2 = z.norm_sqr();
    Ok(match space {
        CosetSpace::CompactCp1 => MomentumTriple {
            t_q: -z.conj() / (1.0 + r2),
            t_minus_q: z / (1.0 + r2),
            t_h: (1.0 - r2) / (1.0 + r2),
        },
        CosetSpace::NoncompactDisk => MomentumTriple {
            t_q: z.conj() / (1.0 - r2),
            t_minus_q: z / (1.0 - r2),
            t_h: (1.0 + r2) / (1.0 - r2),
        },
    })
}

/// Holomorphic Killing vector component `kappa_tau(z) = b + (a - d) z - c z^2`.
pub fn killing_vector(tau: [C64; 4], z: C64) -> C64 {
    let [a, b, c, d] = tau;
    b + (a - d) * z - c * z * z
}

/// Antiholomorphic Killing component for the generator `tau`.
pub fn killing_vector_bar(space: CosetSpace, tau: [C64; 4], z: C64) -> C64 {
    let [a, b, c, d] = tau;
    // tau^dagger, and on the disk lambda tau^dagger lambda.
    let s = space.sign();
    let adj = [a.conj(), c.conj() * s, b.conj() * s, d.conj()];
    -killing_vector(adj, z).conj()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupElement2x2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl GroupElement2x2 {
    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Self {
            a: o,
            b: z,
            c: z,
            d: o,
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(2, 2, vec![self.a, self.b, self.c, self.d])
            .expect("finite entries")
    }

    /// Max-entry deviation from `g^H g = 1` (CP1) or `g^H lambda g = lambda` (disk).
    pub fn group_defect(&self, space: CosetSpace) -> f64 {
        let g = self.matrix();
        let s = C64::new(space.sign(), 0.0);
        let lam = ComplexMatrix::diag(&[C64::new(1.0, 0.0), s]);
        g.adjoint().matmul(&lam).matmul(&g).sub(&lam).max_abs()
    }

    pub fn random_unitary(rng: &mut RngStream) -> Self {
        let u = crate::hciz::haar_unitary(2, rng);
        Self {
            a: u[(0, 0)],
            b: u[(0, 1)],
            c: u[(1, 0)],
            d: u[(1, 1)],
        }
    }

    /// `e^{i phi} [[ch e^{i alpha}, sh e^{i beta}], [sh e^{-i beta}, ch e^{-i alpha}]]`
    /// with rapidity uniform in [0, max_rapidity).
    pub fn random_pseudo_unitary(rng: &mut RngStream, max_rapidity: f64) -> Self {
        let s = max_rapidity * rng.uniform();
        let (ch, sh) = (s.cosh(), s.sinh());
        let phi = 2.0 * PI * rng.uniform();
        let alpha = 2.0 * PI * rng.uniform();
        let beta = 2.0 * PI * rng.uniform();
        let e = |t: f64| C64::from_polar(1.0, t);
        let g = e(phi);
        Self {
            a: g * ch * e(alpha),
            b: g * sh * e(beta),
            c: g * sh * e(-beta),
            d: g * ch * e(-alpha),
        }
    }

    pub fn random(space: CosetSpace, rng: &mut RngStream) -> Self {
        match space {
            CosetSpace::CompactCp1 => Self::random_unitary(rng),
            CosetSpace::NoncompactDisk => Self::random_pseudo_unitary(rng, 1.5),
        }
    }
}

/// `gz = (az + b) / (cz + d)`.
pub fn moebius_action(space: CosetSpace, g: &GroupElement2x2, z: C64) -> Result<C64> {
    space.check(z)?;
    let den = g.c * z + g.d;
    if den.norm() <= 1e-300 {
        return Err(Error::Domain(format!(
            "chart pole: cz + d = 0 at z = {}",
            -g.d / g.c
        )));
    }
    let w = (g.a * z + g.b) / den;
    if space == CosetSpace::NoncompactDisk && w.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "image |gz| = {} left the disk",
            w.norm()
        )));
    }
    Ok(w)
}

/// `K(gz) - K(z) + 2 ln|cz + d|`, zero for group elements.
pub fn potential_cocycle_defect(space: CosetSpace, g: &GroupElement2x2, z: C64) -> Result<f64> {
    let w = moebius_action(space, g, z)?;
    Ok(kahler_potential(space, w)? - kahler_potential(space, z)?
        + 2.0 * (g.c * z + g.d).norm().ln())
}

/// Max-entry deviation of `rho(gz)` from `g rho(z) g^H` (CP1) or `g rho(z) g^{-1}` (disk).
pub fn rho_transformation_defect(space: CosetSpace, g: &GroupElement2x2, z: C64) -> Result<f64> {
    let w = moebius_action(space, g, z)?;
    let gm = g.matrix();
    let right = match space {
        CosetSpace::CompactCp1 => gm.adjoint(),
        CosetSpace::NoncompactDisk => gm.inverse()?,
    };
    let moved = gm.matmul(&rho_matrix(space, z)?).matmul(&right);
    Ok(moved.sub(&rho_matrix(space, w)?).max_abs())
}

/// Wirtinger derivatives (d/dz, d/dzbar) by five-point central differences.
fn wirtinger(f: &dyn Fn(C64) -> C64, z: C64, h: f64) -> (C64, C64) {
    let d = |e: C64| (f(z - e * 2.0) - f(z + e * 2.0) + (f(z + e) - f(z - e)) * 8.0) / (12.0 * h);
    let fx = d(C64::new(h, 0.0));
    let fy = d(I * h);
    ((fx - I * fy) * 0.5, (fx + I * fy) * 0.5)
}

/// Residuals of the holomorphy conditions for the flow of `hamiltonian`:
/// `max(|d_z(omega^{-1} d_z H)|, |d_zbar(omega^{-1} d_zbar H)|)`.
pub fn hamiltonian_residual(
    space: CosetSpace,
    hamiltonian: &dyn Fn(C64) -> C64,
    z: C64,
    h: f64,
) -> Result<f64> {
    space.check(z)?;
    let inv = |w: C64| C64::new(1.0, 0.0) / form_coefficient(space, w).expect("interior point");
    let vz = |w: C64| inv(w) * wirtinger(hamiltonian, w, h).0;
    let vzb = |w: C64| inv(w) * wirtinger(hamiltonian, w, h).1;
    let r1 = wirtinger(&vz, z, h).0.norm();
    let r2 = wirtinger(&vzb, z, h).1.norm();
    Ok(r1.max(r2))
}

/// Residuals of `d_zbar T_a = 2 pi i kappa_a omega` and
/// `d_z T_a = -2 pi i kappabar_a omega` over the three generators.
pub fn momentum_pde_residual(space: CosetSpace, z: C64, h: f64) -> Result<f64> {
    space.check(z)?;
    let om = form_coefficient(space, z)?;
    let mut worst: f64 = 0.0;
    for g in Generator::ALL {
        let t = |w: C64| momentum_map(space, w, g).expect("interior point");
        let (dz, dzb) = wirtinger(&t, z, h);
        let tau = g.matrix();
        let r1 = (dzb - 2.0 * PI * I * killing_vector(tau, z) * om).norm();
        let r2 = (dz + 2.0 * PI * I * killing_vector_bar(space, tau, z) * om).norm();
        worst = worst.max(r1).max(r2);
    }
    Ok(worst)
}

/// Combined max-norm of the momentum-map PDE residuals and the holomorphy
/// residuals for `T_h`, `T_q`, `T_{-q}`.
pub fn localizability_residual(space: CosetSpace, z: C64, h: f64) -> Result<f64> {
    let mut worst = momentum_pde_residual(space, z, h)?;
    for g in Generator::ALL {
        let t = move |w: C64| momentum_map(space, w, g).expect("interior point");
        worst = worst.max(hamiltonian_residual(space, &t, z, h)?);
    }
    Ok(worst)
}

/// `T_h^2 T_q`: not a linear combination of momentum maps, so its flow is
/// not holomorphic. Negative control for `hamiltonian_residual`.
pub fn non_localizable_hamiltonian(space: CosetSpace) -> impl Fn(C64) -> C64 {
    move |w: C64| {
        let m = momentum_maps(space, w).expect("interior point");
        m.t_q * m.t_h * m.t_h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DhGrid {
    pub radial: usize,
    pub angular: usize,
}

impl Default for DhGrid {
    fn default() -> Self {
        Self {
            radial: 160,
            angular: 8,
        }
    }
}

/// Quadrature of `int Omega exp(i t T_h)`.
///
/// CP1 uses `z = tan(phi/2) e^{i theta}`, where the measure is `sin(phi)/4 dphi dtheta / pi`.
/// The disk uses `z = tanh(s) e^{i theta}` with measure `sinh(2s)/2 ds dtheta / pi`,
/// truncated where `Im(t) cosh(2s)` exceeds 40.
pub fn dh_integral_numeric(space: CosetSpace, t: C64, grid: DhGrid) -> Result<C64> {
    let ang = trapezoid_periodic(grid.angular);
    let order = 16;
    let panels = grid.radial.div_ceil(order).max(1);
    let (rule, point, weight): (_, Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>) = match space {
        CosetSpace::CompactCp1 => (
            composite_legendre(0.0, PI, panels, order),
            Box::new(|phi: f64| (phi / 2.0).tan()),
            Box::new(|phi: f64| phi.sin() / (4.0 * PI)),
        ),
        CosetSpace::NoncompactDisk => {
            if t.im <= 0.0 {
                return Err(Error::Divergent(format!(
                    "disk integral needs Im t > 0, got t = {t}"
                )));
            }
            let cut = (40.0 / t.im).max(1.0).acosh() / 2.0;
            (
                composite_legendre(0.0, cut, panels, order),
                Box::new(|s: f64| s.tanh()),
                Box::new(|s: f64| (2.0 * s).sinh() / (2.0 * PI)),
            )
        }
    };
    let mut total = C64::new(0.0, 0.0);
    for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
        let r = point(u);
        let mut ring = C64::new(0.0, 0.0);
        for (&th, &wt) in ang.nodes.iter().zip(&ang.weights) {
            let z = C64::from_polar(r, th);
            let th_val = momentum_map(space, z, Generator::H)?.re;
            ring += (I * t * th_val).exp() * wt;
        }
        total += ring * (wu * weight(u));
    }
    Ok(total)
}

/// One fixed point of the flow of `T_h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub h0: f64,
    /// `d dbar T_h` at the fixed point in a local chart where the density is `density`.
    pub curvature: f64,
    pub density: f64,
}

/// Fixed points of `T_h` with the quadratic data of `T_h` there. The
/// curvature is measured numerically from the momentum map (Richardson-extrapolated
/// five-point Laplacian), the point at infinity of CP1 through the chart `w = 1/z`.
pub fn fixed_points(space: CosetSpace) -> Result<Vec<FixedPoint>> {
    let lap = |f: &dyn Fn(C64) -> f64, h: f64| {
        let o = C64::new(0.0, 0.0);
        (f(o + h) + f(o - h) + f(o + I * h) + f(o - I * h) - 4.0 * f(o)) / (h * h)
    };
    let curvature = |f: &dyn Fn(C64) -> f64| {
        let (a, b) = (lap(f, 2e-3), lap(f, 1e-3));
        (4.0 * b - a) / 3.0 / 4.0
    };
    let th = move |z: C64| momentum_map(space, z, Generator::H).expect("interior").re;
    let zero = C64::new(0.0, 0.0);
    let mut out = vec![FixedPoint {
        h0: th(zero),
        curvature: curvature(&th),
        density: metric_density(space, zero)?,
    }];
    if space == CosetSpace::CompactCp1 {
        // Near infinity: T_h(1/w) = -T_h(w) and the density is the same function of w.
        let th_inf = move |w: C64| {
            if w.norm() == 0.0 {
                -1.0
            } else {
                momentum_map(space, C64::new(1.0, 0.0) / w, Generator::H)
                    .expect("finite")
                    .re
            }
        };
        out.push(FixedPoint {
            h0: -1.0,
            curvature: curvature(&th_inf),
            density: metric_density(space, zero)?,
        });
    }
    Ok(out)
}

/// Stationary-phase sum over fixed points: each contributes
/// `pi * density * i e^{i t H0} / (t * curvature)`.
pub fn dh_fixed_point_sum(space: CosetSpace, t: C64) -> Result<C64> {
    if t.norm() == 0.0 {
        return match space {
            CosetSpace::CompactCp1 => Ok(C64::new(1.0, 0.0)),
            CosetSpace::NoncompactDisk => {
                Err(Error::Divergent("disk volume is infinite at t = 0".into()))
            }
        };
    }
    if space == CosetSpace::NoncompactDisk && t.im <= 0.0 {
        return Err(Error::Divergent(format!(
            "disk integral needs Im t > 0, got t = {t}"
        )));
    }
    let mut sum = C64::new(0.0, 0.0);
    for fp in fixed_points(space)? {
        sum += PI * fp.density * I * (I * t * fp.h0).exp() / (t * fp.curvature);
    }
    Ok(sum)
}

/// Closed form of the DH integral: `sin t / t` (CP1), `i e^{it} / (2t)` (disk).
pub fn dh_closed_form(space: CosetSpace, t: C64) -> C64 {
    match space {
        CosetSpace::CompactCp1 => {
            if t.norm() < 1e-8 {
                C64::new(1.0, 0.0) - t * t / 6.0
            } else {
                t.sin() / t
            }
        }
        CosetSpace::NoncompactDisk => I * (I * t).exp() / (2.0 * t),
    }
}

/// Total mass of `metric_density` on CP1 by radial quadrature in `u = r^2 / (1 + r^2)`.
pub fn cp1_volume() -> f64 {
    let r = gauss_legendre(40).mapped(0.0, 1.0);
    r.nodes
        .iter()
        .zip(&r.weights)
        .map(|(&u, &w)| {
            let r2 = u / (1.0 - u);
            // dA = pi d(r^2), d(r^2) = du / (1 - u)^2
            w * PI * metric_density(CosetSpace::CompactCp1, C64::new(r2.sqrt(), 0.0)).unwrap()
                / (1.0 - u).powi(2)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use CosetSpace::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn potential_examples() {
        assert_eq!(kahler_potential(CompactCp1, c(0.0, 0.0)).unwrap(), 0.0);
        assert!(
            (kahler_potential(NoncompactDisk, c(0.3, 0.4)).unwrap() - 0.75f64.ln()).abs() < 1e-15
        );
        assert!((kahler_potential(CompactCp1, c(0.6, 0.8)).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(kahler_potential(NoncompactDisk, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn density_matches_potential_laplacian() {
        // density = |d dbar K| / pi, d dbar = Laplacian / 4.
        for (space, z) in [
            (CompactCp1, c(0.0, 0.0)),
            (NoncompactDisk, c(0.0, 0.0)),
            (CompactCp1, c(0.4, -1.1)),
        ] {
            let k = |w: C64| kahler_potential(space, w).unwrap();
            let h = 1e-4;
            let lap = (k(z + h) + k(z - h) + k(z + I * h) + k(z - I * h) - 4.0 * k(z)) / (h * h);
            let d = metric_density(space, z).unwrap();
            assert!((d - lap.abs() / 4.0 / PI).abs() < 1e-6, "{space:?} {z}");
        }
        assert!((metric_density(CompactCp1, c(0.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((metric_density(NoncompactDisk, c(0.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn cp1_total_mass_is_one() {
        assert!((cp1_volume() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn momentum_maps_at_origin_and_infinity() {
        let m = momentum_maps(CompactCp1, c(0.0, 0.0)).unwrap();
        assert_eq!(m.t_h, 1.0);
        assert_eq!(m.t_q, c(0.0, 0.0));
        let rho = rho_matrix(CompactCp1, c(0.0, 0.0)).unwrap();
        assert_eq!(rho, ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)]));
        let d = momentum_maps(NoncompactDisk, c(0.0, 0.0)).unwrap();
        assert_eq!(d.t_h, 1.0);
        let rho = rho_matrix(NoncompactDisk, c(0.0, 0.0)).unwrap();
        assert!(
            rho.sub(&ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)]))
                .max_abs()
                < 1e-15
        );
        let far = momentum_maps(CompactCp1, c(1e5, 3e4)).unwrap();
        assert!((far.t_h + 1.0).abs() < 1e-9);
    }

    #[test]
    fn trace_formula_matches_closed_forms() {
        let mut rng = RngStream::new(10, 0);
        for space in [CompactCp1, NoncompactDisk] {
            for _ in 0..50 {
                let z = c(rng.uniform() - 0.5, rng.uniform() - 0.5) * 1.3;
                let a = momentum_maps(space, z).unwrap();
                let b = momentum_maps_closed_form(space, z).unwrap();
                assert!((a.t_q - b.t_q).norm() < 1e-13);
                assert!((a.t_minus_q - b.t_minus_q).norm() < 1e-13);
                assert!((a.t_h - b.t_h).abs() < 1e-13);
                match space {
                    CompactCp1 => assert!(a.t_h.abs() <= 1.0),
                    NoncompactDisk => assert!(a.t_h >= 1.0),
                }
            }
        }
    }

    #[test]
    fn rotation_acts_by_phase() {
        let th = 0.7;
        let g = GroupElement2x2 {
            a: C64::from_polar(1.0, th),
            b: c(0.0, 0.0),
            c: c(0.0, 0.0),
            d: C64::from_polar(1.0, -th),
        };
        let z = c(0.3, -0.2);
        let w = moebius_action(CompactCp1, &g, z).unwrap();
        assert!((w - z * C64::from_polar(1.0, 2.0 * th)).norm() < 1e-15);
        assert_eq!(
            moebius_action(CompactCp1, &GroupElement2x2::identity(), z).unwrap(),
            z
        );
    }

    #[test]
    fn pseudo_unitary_action_stays_in_disk() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..20 {
            let g = GroupElement2x2::random_pseudo_unitary(&mut rng, 2.0);
            assert!(g.group_defect(NoncompactDisk) < 1e-12);
            for k in 0..50 {
                let z = C64::from_polar(0.9, 2.0 * PI * k as f64 / 50.0);
                assert!(moebius_action(NoncompactDisk, &g, z).unwrap().norm() < 1.0);
            }
        }
    }

    #[test]
    fn dh_examples() {
        let g = DhGrid::default();
        assert!((dh_integral_numeric(CompactCp1, c(0.0, 0.0), g).unwrap() - 1.0).norm() < 1e-12);
        let v = dh_integral_numeric(CompactCp1, c(1.0, 0.0), g).unwrap();
        assert!((v - c(1f64.sin(), 0.0)).norm() < 1e-10);
        let d = dh_integral_numeric(NoncompactDisk, c(0.0, 2.0), g).unwrap();
        assert!((d - c((-2f64).exp() / 4.0, 0.0)).norm() < 1e-10, "{d}");
        assert!(dh_integral_numeric(NoncompactDisk, c(1.0, 0.0), g).is_err());
        assert!(
            (dh_fixed_point_sum(CompactCp1, c(1.0, 0.0)).unwrap() - c(1f64.sin(), 0.0)).norm()
                < 1e-8
        );
        assert_eq!(
            dh_fixed_point_sum(CompactCp1, c(0.0, 0.0)).unwrap(),
            c(1.0, 0.0)
        );
        assert!(dh_fixed_point_sum(NoncompactDisk, c(0.0, 0.0)).is_err());
        let fp = dh_fixed_point_sum(NoncompactDisk, c(0.0, 2.0)).unwrap();
        assert!((fp - c((-2f64).exp() / 4.0, 0.0)).norm() < 1e-8, "{fp}");
    }

    #[test]
    fn fixed_point_curvatures() {
        let f = fixed_points(CompactCp1).unwrap();
        assert!((f[0].curvature + 2.0).abs() < 1e-6);
        assert!((f[1].curvature - 2.0).abs() < 1e-6);
        let d = fixed_points(NoncompactDisk).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0].curvature - 2.0).abs() < 1e-6);
    }

    #[test]
    fn localizability_examples() {
        assert!(localizability_residual(CompactCp1, c(0.3, 0.2), 1e-4).unwrap() <= 1e-6);
        assert!(localizability_residual(NoncompactDisk, c(0.0, 0.5), 1e-4).unwrap() <= 1e-6);
        for space in [CompactCp1, NoncompactDisk] {
            let bad = non_localizable_hamiltonian(space);
            let r = hamiltonian_residual(space, &bad, c(0.3, 0.2), 1e-4).unwrap();
            assert!(r > 1e-2, "{space:?}: {r}");
        }
    }
}
