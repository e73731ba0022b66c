//! Small dense Hermitian linear algebra for 2x3 states.
//!
//! Basis convention: the product state |a b> (qubit a in {0,1}, qutrit b in
//! {0,1,2}) sits at index m = 3a + b. The partial transpose acts on the qubit
//! and depends on this ordering.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};

pub type C64 = Complex64;

/// Dimension of the qubit-qutrit Hilbert space.
pub const DIM: usize = 6;
pub const MAX_DIM: usize = 6;

const JACOBI_THRESHOLD: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Numerical slack used when validating inputs and outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub psd: f64,
    pub trace: f64,
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-12,
            psd: 1e-12,
            trace: 1e-12,
            reconstruction: 1e-11,
        }
    }
}

/// Row-major complex matrix of dimension at most 6, stored inline.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; MAX_DIM * MAX_DIM],
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(ComplexMatrix {
            dim,
            data: [C64::new(0.0, 0.0); MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        Ok(m)
    }

    /// Build from nested rows; all rows must have the same length as the outer vector.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: bad.len(),
            });
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Block-diagonal matrix from square real blocks.
    pub fn real_block_diag(blocks: &[&[&[f64]]]) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.len()).sum();
        let mut m = Self::zeros(n)?;
        let mut off = 0;
        for b in blocks {
            for (i, row) in b.iter().enumerate() {
                if row.len() != b.len() {
                    return Err(Error::Dimension {
                        expected: b.len(),
                        found: row.len(),
                    });
                }
                for (j, &x) in row.iter().enumerate() {
                    m[(off + i, off + j)] = C64::new(x, 0.0);
                }
            }
            off += b.len();
        }
        Ok(m)
    }

    /// Rank-one projector |v><v| (v is used as given, not normalized).
    pub fn outer(v: &[C64]) -> Result<Self> {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)]).collect())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = self.clone();
        for z in m.data.iter_mut() {
            *z *= s;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// tr(self * other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let n = self.dim;
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                s += self[(i, k)] * other[(k, i)];
            }
        }
        s
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        (self - other).max_abs()
    }

    /// Largest |H_jk - conj(H_kj)|.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// (H + H^dagger) / 2.
    pub fn hermitian_part(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in i + 1..self.dim {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    fn entries(&self) -> impl Iterator<Item = &C64> {
        self.data[..self.dim * self.dim].iter()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| format!("{:+.6}{:+.6}i", self[(i, j)].re, self[(i, j)].im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n).expect("valid dim");
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += r;
        }
        out
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o -= r;
        }
        out
    }
}

/// Eigenvalues in ascending order, eigenvectors as the matching columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// V diag(f(lambda)) V^dagger.
    pub fn rebuild_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.vectors;
        let w: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * w[k]).sum()
        })
        .expect("valid dim")
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.rebuild_with(|x| x)
    }
}

pub fn eig_hermitian(h: &ComplexMatrix) -> Result<EigenSystem> {
    eig_hermitian_with(h, &Tolerances::default())
}

/// Cyclic complex Jacobi. Stops when the off-diagonal Frobenius norm drops
/// below 1e-14 times max(1, ||H||_F).
pub fn eig_hermitian_with(h: &ComplexMatrix, tol: &Tolerances) -> Result<EigenSystem> {
    let deviation = h.hermitian_deviation();
    if deviation > tol.hermiticity {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: tol.hermiticity,
        });
    }
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n)?;
    let threshold = JACOBI_THRESHOLD * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    while a.off_diagonal_norm() > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off: a.off_diagonal_norm(),
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])])?;
    Ok(EigenSystem { values, vectors })
}

pub fn eigvals_hermitian(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(h)?.values)
}

// Annihilate a[p][q] with U = diag(1, e^{-i arg a_pq}) * real rotation.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = (apq / b).conj();
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase * (-s);
    let u_qq = phase * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Transpose on the qubit factor: out[(a,b),(a',b')] = in[(a',b),(a,b')].
pub fn partial_transpose_qubit(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.dim() != DIM {
        return Err(Error::Dimension {
            expected: DIM,
            found: m.dim(),
        });
    }
    ComplexMatrix::from_fn(DIM, |row, col| {
        let (a, b) = (row / 3, row % 3);
        let (ap, bp) = (col / 3, col % 3);
        m[(3 * ap + b, 3 * a + bp)]
    })
}

pub fn trace_norm(h: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals_hermitian(h)?.iter().map(|x| x.abs()).sum())
}

/// Validated 6x6 density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::default())
    }

    pub fn new_with(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix.dim() != DIM {
            return Err(Error::Dimension {
                expected: DIM,
                found: matrix.dim(),
            });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::Trace {
                trace,
                tolerance: tol.trace,
            });
        }
        let min_eigenvalue = eig_hermitian_with(&matrix, tol)?.values[0];
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(DensityMatrix {
            matrix: matrix.hermitian_part(),
        })
    }

    /// sum_k w_k |v_k><v_k| for orthonormal columns of `vectors`.
    pub fn from_spectral(weights: &[f64], vectors: &ComplexMatrix) -> Result<Self> {
        if weights.len() != DIM || vectors.dim() != DIM {
            return Err(Error::Dimension {
                expected: DIM,
                found: weights.len().min(vectors.dim()),
            });
        }
        let m = ComplexMatrix::from_fn(DIM, |i, j| {
            (0..DIM)
                .map(|k| vectors[(i, k)] * vectors[(j, k)].conj() * weights[k])
                .sum()
        })?;
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(DIM)
                .expect("valid dim")
                .scale(1.0 / DIM as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvals_hermitian(&self.matrix).expect("density matrix is Hermitian")
    }

    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose_qubit(&self.matrix).expect("dimension 6")
    }
}

/// ||rho^Gamma||_tr - 1.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    trace_norm(&rho.partial_transpose()).expect("partial transpose is Hermitian") - 1.0
}

/// 2 * sum of the negative partial-transpose eigenvalues' magnitudes.
pub fn negativity_from_pt_spectrum(rho: &DensityMatrix) -> f64 {
    let ev = eigvals_hermitian(&rho.partial_transpose()).expect("partial transpose is Hermitian");
    2.0 * ev.iter().map(|&x| (-x).max(0.0)).sum::<f64>()
}

/// tr rho^2, computed from entries.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.entries().map(|z| z.norm_sqr()).sum()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary via QR of a Ginibre matrix.
///
/// Gram-Schmidt (applied twice per column) yields R with a positive real
/// diagonal, which is exactly the phase correction needed for Haar measure.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_domain("dim", dim as f64, "{2,...,6}", (2..=MAX_DIM).contains(&dim))?;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Degenerate draws have probability zero; redraw if one shows up anyway.
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Uniform point on the probability simplex from normalized exponential draws.
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn sum_squares(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Map a positive probability vector to one with sum of squares `p`, keeping
/// it strictly positive.
///
/// Too pure: shrink toward uniform along the straight line (exact quadratic).
/// Too mixed: temper x_i -> x_i^beta / Z with beta > 1 found by bisection.
pub fn adjust_purity(x: &[f64], p: f64) -> Vec<f64> {
    let n = x.len() as f64;
    let u = 1.0 / n;
    let px = sum_squares(x);
    if px >= p {
        let t = ((p - u) / (px - u)).sqrt();
        return x.iter().map(|&v| u + t * (v - u)).collect();
    }
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let tempered = |beta: f64| -> Vec<f64> {
        let m = logs.iter().fold(f64::NEG_INFINITY, |a, &l| a.max(beta * l));
        let w: Vec<f64> = logs.iter().map(|&l| (beta * l - m).exp()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    };
    let mut lo = 1.0;
    let mut hi = 2.0;
    while sum_squares(&tempered(hi)) < p {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum_squares(&tempered(mid)) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let w = tempered(0.5 * (lo + hi));
    // Final exact touch-up along the line to uniform (tiny t change).
    let pw = sum_squares(&w);
    if pw >= p {
        let t = ((p - u) / (pw - u)).sqrt();
        w.iter().map(|&v| u + t * (v - u)).collect()
    } else {
        w
    }
}

/// Spectrum with exact purity `p`, full rank, sorted descending.
pub fn random_fixed_purity_spectrum<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_domain("purity", p, "(1/6, 1)", p > 1.0 / 6.0 && p < 1.0)?;
    let x = random_simplex(DIM, rng);
    let mut lam = adjust_purity(&x, p);
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok(lam)
}

/// Random full-rank state of purity `p`: fixed-purity spectrum conjugated by a
/// Haar unitary.
pub fn random_density_fixed_purity<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<DensityMatrix> {
    let lam = random_fixed_purity_spectrum(p, rng)?;
    let u = haar_unitary(DIM, rng)?;
    DensityMatrix::from_spectral(&lam, &u)
}

/// t |psi><psi| + (1 - t) I/6 with Haar-random psi and t fixed by the purity.
pub fn random_noisy_pure_state<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<DensityMatrix> {
    check_domain("purity", p, "(1/6, 1)", p > 1.0 / 6.0 && p < 1.0)?;
    let t = ((p - 1.0 / 6.0) / (5.0 / 6.0)).sqrt();
    let u = haar_unitary(DIM, rng)?;
    let mut w = [(1.0 - t) / 6.0; DIM];
    w[0] += t;
    DensityMatrix::from_spectral(&w, &u)
}

/// Projector onto the span of the eigenvectors whose eigenvalue passes `keep`.
pub fn spectral_projector(es: &EigenSystem, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
    es.rebuild_with(|x| if keep(x) { 1.0 } else { 0.0 })
}
