//! Dense complex linear algebra and permutation helpers.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// A complex number stored as `exp(ln_abs) * phase` with `|phase| = 1`.
/// `ln_abs = -inf` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    pub phase: C64,
}

impl LogValue {
    pub const ONE: LogValue = LogValue {
        ln_abs: 0.0,
        phase: C64::new(1.0, 0.0),
    };

    pub fn from_complex(z: C64) -> Self {
        let a = z.norm();
        if a == 0.0 {
            LogValue {
                ln_abs: f64::NEG_INFINITY,
                phase: C64::new(1.0, 0.0),
            }
        } else {
            LogValue {
                ln_abs: a.ln(),
                phase: z / a,
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }

    pub fn mul(self, other: LogValue) -> LogValue {
        LogValue {
            ln_abs: self.ln_abs + other.ln_abs,
            phase: renorm(self.phase * other.phase),
        }
    }

    pub fn div(self, other: LogValue) -> LogValue {
        LogValue {
            ln_abs: self.ln_abs - other.ln_abs,
            phase: renorm(self.phase * other.phase.conj()),
        }
    }

    pub fn mul_complex(self, z: C64) -> LogValue {
        self.mul(LogValue::from_complex(z))
    }

    pub fn powi(self, n: i32) -> LogValue {
        if self.is_zero() {
            return if n == 0 { LogValue::ONE } else { self };
        }
        LogValue {
            ln_abs: self.ln_abs * n as f64,
            phase: renorm(self.phase.powi(n)),
        }
    }

    /// Angle of the phase in (-pi, pi].
    pub fn angle(&self) -> f64 {
        self.phase.arg()
    }

    pub fn to_complex(&self) -> C64 {
        if self.is_zero() {
            C64::new(0.0, 0.0)
        } else {
            self.phase * self.ln_abs.exp()
        }
    }
}

fn renorm(z: C64) -> C64 {
    let a = z.norm();
    if a == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        ComplexMatrix::from_fn(r, c, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::new(self)
    }

    pub fn det(&self) -> Result<C64> {
        Ok(self.log_det()?.to_complex())
    }

    pub fn log_det(&self) -> Result<LogValue> {
        if !self.is_square() {
            return Err(Error::InvalidInput(
                "determinant of a non-square matrix".into(),
            ));
        }
        match self.rows {
            0 => Ok(LogValue::ONE),
            1 => Ok(LogValue::from_complex(self.data[0])),
            2 => Ok(LogValue::from_complex(
                self.data[0] * self.data[3] - self.data[1] * self.data[2],
            )),
            _ => Ok(Lu::new(self)?.log_det()),
        }
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        Lu::new(self)?.inverse()
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn expm(&self) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(Error::InvalidInput("expm of a non-square matrix".into()));
        }
        let n = self.rows;
        let norm = self.norm_inf();
        let mut squarings = 0u32;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
        }
        let a = self.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
        // ||a|| <= 0.5: 18 Taylor terms put the truncation error below 1e-20.
        let mut term = ComplexMatrix::identity(n);
        let mut sum = ComplexMatrix::identity(n);
        for k in 1..=18 {
            term = term.matmul(&a).scale(C64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        Ok(sum)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidInput("LU of a non-square matrix".into()));
        }
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in (k + 1)..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= f * u;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn log_det(&self) -> LogValue {
        let mut out = LogValue::ONE;
        if self.swaps % 2 == 1 {
            out.phase = -out.phase;
        }
        for k in 0..self.n {
            out = out.mul(LogValue::from_complex(self.lu[k * self.n + k]));
        }
        out
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if (0..n).any(|k| self.lu[k * n + k] == C64::new(0.0, 0.0)) {
            return Err(Error::Degenerate("singular matrix".into()));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[i * n + j];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub const TOL: f64 = 1e-14;

    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput(
                "Hermitian matrix must be square".into(),
            ));
        }
        let n = m.rows();
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > Self::TOL * (1.0 + m[(i, j)].norm()) {
                    return Err(Error::InvalidInput(format!("not Hermitian at ({i},{j})")));
                }
            }
        }
        Ok(Self(m))
    }

    /// Caller guarantees exact Hermiticity (lower triangle mirrors upper).
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite eigenvalue".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Eigen {
    pub spectrum: Spectrum,
    /// Columns are eigenvectors, in the order of `spectrum`.
    pub vectors: ComplexMatrix,
}

const JACOBI_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<Spectrum> {
    Ok(eigh_jacobi(h)?.spectrum)
}

/// Eigen-decomposition by cyclic complex Jacobi rotations.
pub fn eigh_jacobi(h: &HermitianMatrix) -> Result<Eigen> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let tol = 1e-13 * scale;
    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut converged = scale == 0.0 || off(&a) <= tol;
    let mut sweep = 0;
    while !converged && sweep < JACOBI_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let e = apq / mag;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = [[c, s e], [-s conj(e), c]] on the (p, q) plane; A <- J^H A J.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * (s * e.conj());
                    a[(k, q)] = akp * (s * e) + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * (s * e);
                    a[(q, k)] = apk * (s * e.conj()) + aqk * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * (s * e.conj());
                    v[(k, q)] = vkp * (s * e) + vkq * c;
                }
            }
        }
        sweep += 1;
        converged = off(&a) <= tol;
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "Jacobi eigensolver: off-diagonal norm {:.3e} after {JACOBI_SWEEPS} sweeps",
            off(&a)
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen {
        spectrum: Spectrum::new(values)?,
        vectors,
    })
}

/// Eigenvalues only, by Householder reduction to real tridiagonal form followed
/// by implicit QL. Cheaper than Jacobi; used on the Monte Carlo hot path.
pub fn eigvals_tridiagonal(h: &HermitianMatrix) -> Result<Spectrum> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let zero = C64::new(0.0, 0.0);
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: Vec<C64> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = v[0];
        let ph = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -ph * xnorm;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            e[k] = xnorm;
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // Trailing block B <- H B H with H = I - 2 v v^H.
        let off = k + 1;
        let mut p = vec![zero; m];
        for i in 0..m {
            let mut s = zero;
            for j in 0..m {
                s += a[(off + i, off + j)] * v[j];
            }
            p[i] = s;
        }
        let kk: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
        for i in 0..m {
            for j in 0..m {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(off + i, off + j)] -= upd * 2.0;
            }
        }
        e[k] = xnorm;
        for i in 0..m {
            a[(off + i, k)] = zero;
            a[(k, off + i)] = zero;
        }
    }
    for i in 0..n {
        d[i] = a[(i, i)].re;
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)].norm();
    }
    if n >= 1 {
        e[n - 1] = 0.0;
    }
    tql_eigenvalues(&mut d, &mut e)?;
    Spectrum::new(d)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `e[i]` couples `d[i]`
/// and `d[i + 1]`; `e[n - 1]` is ignored. Eigenvalues overwrite `d`.
fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence(
                    "tridiagonal QL exceeded 60 iterations".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Vandermonde product prod_{i<j} (x_i - x_j).
pub fn vandermonde(x: &[C64]) -> C64 {
    let mut out = C64::new(1.0, 0.0);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            out *= x[i] - x[j];
        }
    }
    out
}

pub fn vandermonde_real(x: &[f64]) -> f64 {
    let mut out = 1.0;
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            out *= x[i] - x[j];
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
    parity: i8,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let m = image.len();
        let mut seen = vec![false; m];
        for &i in &image {
            if i >= m || seen[i] {
                return Err(Error::InvalidInput("image is not a bijection".into()));
            }
            seen[i] = true;
        }
        let parity = inversion_parity(&image);
        Ok(Self { image, parity })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            image: (0..m).collect(),
            parity: 1,
        }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let image: Vec<usize> = other.image.iter().map(|&i| self.image[i]).collect();
        Permutation {
            image,
            parity: self.parity * other.parity,
        }
    }
}

/// (-1)^{number of inversions}
pub fn inversion_parity(image: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..image.len() {
        for j in (i + 1)..image.len() {
            if image[i] > image[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub const MAX_PERMUTATION_SIZE: usize = 10;

/// All permutations of `0..m` in lexicographic order, with parities.
pub fn permutations(m: usize) -> Result<Permutations> {
    if m > MAX_PERMUTATION_SIZE {
        return Err(Error::TooLarge(format!(
            "{m}! permutations (limit m <= {MAX_PERMUTATION_SIZE})"
        )));
    }
    Ok(Permutations {
        next: Some((0..m).collect()),
        parity: 1,
    })
}

pub struct Permutations {
    next: Option<Vec<usize>>,
    parity: i8,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let out = Permutation {
            image: cur.clone(),
            parity: self.parity,
        };
        // Lexicographic successor; track parity from the swap and the reversal.
        let mut a = cur;
        let n = a.len();
        if n >= 2 {
            let mut i = n - 1;
            while i > 0 && a[i - 1] >= a[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while a[j] <= a[i - 1] {
                    j -= 1;
                }
                a.swap(i - 1, j);
                let tail = n - i;
                let reversal_swaps = tail / 2;
                a[i..].reverse();
                let flips = 1 + reversal_swaps;
                self.parity = if flips % 2 == 0 {
                    self.parity
                } else {
                    -self.parity
                };
                self.next = Some(a);
            }
        }
        Some(out)
    }
}
