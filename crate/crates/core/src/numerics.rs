//! Dense complex linear algebra.
//!
//! Everything in the crate bottoms out in [`ComplexMatrix`], a row-major
//! matrix of `Complex64` entries. Hermitian eigenproblems are solved with a
//! cyclic complex Jacobi method: it is slow compared to tridiagonal QL, but
//! it is accurate to a few ulps, trivially deterministic, and the matrices
//! handled here stay below a few hundred rows.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub type C64 = Complex64;

/// Relative tolerance for Hermitian symmetry checks.
pub const TOL_HERM: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Clone, Debug, PartialEq)]
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |i, j| C64::new(f(i, j), 0.0))
    }

    /// Builds a matrix from row-major entries.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &z) in c.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Row-major interleaved `[re, im, re, im, ...]` encoding.
    pub fn to_interleaved(&self) -> Vec<f64> {
        self.data.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_interleaved(rows: usize, cols: usize, values: &[f64]) -> Option<Self> {
        if values.len() != 2 * rows * cols {
            return None;
        }
        let data = values.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        Some(Self { rows, cols, data })
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

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
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

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian within `tol` relative to the largest entry (absolute below 1).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.max_abs().max(1.0)
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Spectral norm, via the largest eigenvalue of `M†M`.
    pub fn op_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = &self.adjoint() * self;
        let eig = hermitian_eig(&gram.hermitian_part(), f64::INFINITY)
            .expect("Gram matrix is Hermitian");
        eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product: `(A⊗B)[i·rB+k][j·cB+l] = A[i][j]·B[k][l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            for i in 0..n {
                let vi = self.vectors[(i, k)] * lambda;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// The input is symmetrised before iterating; `tol` bounds the allowed
/// deviation from Hermiticity relative to the largest entry.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let scale = m.max_abs().max(1.0);
    let deviation = m.hermitian_deviation();
    if deviation > tol * scale {
        return Err(NumericsError::NotHermitian {
            deviation,
            tol: tol * scale,
        });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    jacobi_sweeps(&mut a, &mut v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi_sweeps(a: &mut ComplexMatrix, v: &mut ComplexMatrix) {
    let n = a.rows;
    if n < 2 {
        return;
    }
    let total = a.frobenius_norm().powi(2);
    if total == 0.0 {
        return;
    }
    let target = (f64::EPSILON * f64::EPSILON) * total;
    for _sweep in 0..100 {
        if off_diagonal_norm_sqr(a) <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip rotations that cannot change anything in floating point.
                if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / r;
                let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                // J = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let j00 = C64::new(c, 0.0);
                let j01 = C64::new(s, 0.0);
                let j10 = -phase.conj() * s;
                let j11 = phase.conj() * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j00 + akq * j10;
                    a[(k, q)] = akp * j01 + akq * j11;
                }
                // A <- J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j00.conj() * apk + j10.conj() * aqk;
                    a[(q, k)] = j01.conj() * apk + j11.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j00 + vkq * j10;
                    v[(k, q)] = vkp * j01 + vkq * j11;
                }
            }
        }
    }
}

/// Number of eigenvalues above `tol` of a positive semidefinite matrix.
pub fn rank_eps(m: &ComplexMatrix, tol: f64) -> Result<usize, NumericsError> {
    let eig = hermitian_eig(m, TOL_HERM)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < -tol {
            return Err(NumericsError::NotPsd { eigenvalue: lowest });
        }
    }
    Ok(eig.values.iter().filter(|&&x| x > tol).count())
}

/// `‖M² − M‖ ≤ tol` and `‖M − M†‖ ≤ tol` in operator norm.
pub fn is_projection(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let herm = (m - &m.adjoint()).op_norm();
    if herm > tol {
        return false;
    }
    (&(m * m) - m).op_norm() <= tol
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram–Schmidt (two passes); vectors that vanish below `tol`
/// after projection are dropped.
pub fn orthonormalize(vectors: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let nrm = norm(&w);
        if nrm > tol {
            for wi in w.iter_mut() {
                *wi /= nrm;
            }
            basis.push(w);
        }
    }
    basis
}

/// Orthonormal basis of `{x : Mx ≈ 0}`: eigenvectors of `M†M` whose
/// eigenvalues fall below `tol²·max(1, ‖M‖²)`.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Vec<Vec<C64>> {
    let gram = (&m.adjoint() * m).hermitian_part();
    let eig = hermitian_eig(&gram, f64::INFINITY).expect("Gram matrix is Hermitian");
    let top = eig.values.last().copied().unwrap_or(0.0).max(1.0);
    let cut = tol * tol * top;
    eig.values
        .iter()
        .enumerate()
        .filter(|(_, &x)| x <= cut)
        .map(|(k, _)| eig.vector(k))
        .collect()
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal bases of equal length vectors. Unequal dimensions give 1.
pub fn subspace_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    if a.is_empty() {
        return 0.0;
    }
    let residual_norm = |from: &[Vec<C64>], onto: &[Vec<C64>]| -> f64 {
        let n = from[0].len();
        let cols: Vec<Vec<C64>> = from
            .iter()
            .map(|v| {
                let mut r = v.clone();
                for u in onto {
                    let c = inner(u, v);
                    for (ri, ui) in r.iter_mut().zip(u) {
                        *ri -= c * ui;
                    }
                }
                r
            })
            .collect();
        ComplexMatrix::from_columns(n, &cols).op_norm()
    };
    residual_norm(a, b).max(residual_norm(b, a)).min(1.0)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let cols: Vec<Vec<C64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        C64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        let q = orthonormalize(&cols, 1e-8);
        if q.len() == n {
            return ComplexMatrix::from_columns(n, &q);
        }
    }
}

/// Random Hermitian matrix with i.i.d. Gaussian entries (GUE up to scale).
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    g.hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eig(&ComplexMatrix::identity(3), TOL_HERM).unwrap();
        for v in eig.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_sorted() {
        let m = ComplexMatrix::diagonal(&[c(2.0), c(-1.0)]);
        let eig = hermitian_eig(&m, TOL_HERM).unwrap();
        assert_eq!(eig.values, vec![-1.0, 2.0]);
    }

    #[test]
    fn five_cycle_matches_circulant_formula() {
        let a = ComplexMatrix::from_real_fn(5, 5, |i, j| {
            if (i + 1) % 5 == j || (j + 1) % 5 == i {
                1.0
            } else {
                0.0
            }
        });
        let eig = hermitian_eig(&a, TOL_HERM).unwrap();
        let mut expected: Vec<f64> = (0..5)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 5.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (x, y) in eig.values.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_fn(2, 2, |i, j| if i == 0 && j == 1 { 1.0 } else { 0.0 });
        assert!(matches!(
            hermitian_eig(&m, TOL_HERM),
            Err(NumericsError::NotHermitian { .. })
        ));
    }

    #[test]
    fn random_hermitian_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 17, 40] {
            let m = random_hermitian(n, &mut rng);
            let eig = hermitian_eig(&m, TOL_HERM).unwrap();
            let scale = m.op_norm().max(1.0);
            assert!(eig.reconstruct().max_abs_diff(&m) <= 1e-8 * scale);
            let gram = &eig.vectors.adjoint() * &eig.vectors;
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
            for k in 0..n {
                let v = eig.vector(k);
                let mv = m.mat_vec(&v);
                let resid: f64 = mv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * eig.values[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(resid <= 1e-8 * scale);
            }
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigensolve_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(12, &mut rng);
        let a = hermitian_eig(&m, TOL_HERM).unwrap();
        let b = hermitian_eig(&m.clone(), TOL_HERM).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn kron_units() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let mut e11 = ComplexMatrix::zeros(2, 2);
        e11[(0, 0)] = c(1.0);
        let mut e22 = ComplexMatrix::zeros(2, 2);
        e22[(1, 1)] = c(1.0);
        let k = kron(&e11, &e22);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], c(expect));
            }
        }
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m: Vec<ComplexMatrix> = (0..4)
                .map(|_| ComplexMatrix::from_fn(2, 2, |_, _| C64::new(rng.random(), rng.random())))
                .collect();
            let lhs = &kron(&m[0], &m[1]) * &kron(&m[2], &m[3]);
            let rhs = kron(&(&m[0] * &m[2]), &(&m[1] * &m[3]));
            assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        }
    }

    #[test]
    fn rank_of_zero_and_projector() {
        assert_eq!(rank_eps(&ComplexMatrix::zeros(4, 4), 1e-10).unwrap(), 0);
        let v = [c(0.5), c(0.5), C64::new(0.0, 0.5), c(-0.5)];
        let p = ComplexMatrix::from_fn(4, 4, |i, j| v[i] * v[j].conj());
        assert_eq!(rank_eps(&p, 1e-10).unwrap(), 1);
        let neg = ComplexMatrix::diagonal(&[c(1.0), c(-0.5)]);
        assert!(matches!(rank_eps(&neg, 1e-10), Err(NumericsError::NotPsd { .. })));
    }

    #[test]
    fn projection_checks() {
        assert!(is_projection(&ComplexMatrix::identity(3), 1e-12));
        assert!(!is_projection(&ComplexMatrix::identity(2).scale_real(0.5), 1e-12));
    }

    #[test]
    fn null_space_and_subspace_distance() {
        let m = ComplexMatrix::diagonal(&[c(0.0), c(1.0), c(0.0)]);
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.len(), 2);
        let e0 = vec![c(1.0), c(0.0), c(0.0)];
        let e2 = vec![c(0.0), c(0.0), c(1.0)];
        assert!(subspace_distance(&ns, &[e0.clone(), e2.clone()]) < 1e-12);
        let e1 = vec![c(0.0), c(1.0), c(0.0)];
        assert!((subspace_distance(&[e0], &[e1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(6, &mut rng);
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(6)) < 1e-12);
    }

    #[test]
    fn interleaved_round_trip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64));
        let back = ComplexMatrix::from_interleaved(2, 3, &m.to_interleaved()).unwrap();
        assert_eq!(m, back);
        assert!(ComplexMatrix::from_interleaved(2, 2, &[0.0; 3]).is_none());
    }
}
