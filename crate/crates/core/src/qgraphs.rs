//! Tracial quantum graphs on multimatrix algebras `M = ⊕_a M_{n_a}`.
//!
//! The reference functional is `ψ = Σ_a n_a Tr_a`. Elements are written in
//! matrix-unit coordinates (block by block, row-major inside each block);
//! operators are stored in the ψ-orthonormal basis `e^a_ij / √n_a`, where
//! the L²(M, ψ) adjoint is the conjugate transpose.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::Channel;
use crate::numerics::{hermitian_eig, ComplexMatrix, C64};

const TOL_UNDIRECTED: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumGraphError {
    #[error("operator is not regular")]
    NotRegular,
    #[error("operator is not self-adjoint on L²(M, ψ) (deviation {0:e})")]
    NotUndirected(f64),
    #[error("operator has size {got}, the algebra has dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiMatrixAlgebra {
    block_dims: Vec<usize>,
}

impl MultiMatrixAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Self {
        assert!(block_dims.iter().all(|&n| n > 0), "blocks must be nonempty");
        Self { block_dims }
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// `Σ n_a²`.
    pub fn dimension(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.block_dims.len());
        let mut acc = 0;
        for &n in &self.block_dims {
            out.push(acc);
            acc += n * n;
        }
        out
    }

    /// Coordinate index of `e^a_ij`.
    pub fn unit_index(&self, block: usize, i: usize, j: usize) -> usize {
        self.offsets()[block] + i * self.block_dims[block] + j
    }

    /// `(block, i, j)` for every coordinate, in order.
    pub fn units(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.dimension());
        for (a, &n) in self.block_dims.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.push((a, i, j));
                }
            }
        }
        out
    }

    /// `√n_a` for each coordinate: matrix-unit coordinates times this
    /// give ψ-orthonormal coordinates.
    pub fn orthonormal_scales(&self) -> Vec<f64> {
        self.units().iter().map(|&(a, _, _)| (self.block_dims[a] as f64).sqrt()).collect()
    }

    pub fn unit(&self) -> Vec<C64> {
        self.units()
            .iter()
            .map(|&(_, i, j)| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
            .collect()
    }

    pub fn multiply(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dimension()];
        for (&off, &n) in self.offsets().iter().zip(&self.block_dims) {
            for i in 0..n {
                for k in 0..n {
                    let xik = x[off + i * n + k];
                    if xik.re == 0.0 && xik.im == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        out[off + i * n + j] += xik * y[off + k * n + j];
                    }
                }
            }
        }
        out
    }

    pub fn adjoint(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dimension()];
        for (&off, &n) in self.offsets().iter().zip(&self.block_dims) {
            for i in 0..n {
                for j in 0..n {
                    out[off + i * n + j] = x[off + j * n + i].conj();
                }
            }
        }
        out
    }

    /// `ψ(x) = Σ_a n_a Tr(x_a)`.
    pub fn psi(&self, x: &[C64]) -> C64 {
        self.units()
            .iter()
            .enumerate()
            .filter(|(_, (_, i, j))| i == j)
            .map(|(k, &(a, _, _))| x[k] * self.block_dims[a] as f64)
            .sum()
    }

    /// `⟨x, y⟩_ψ = ψ(x*y)`.
    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        self.psi(&self.multiply(&self.adjoint(x), y))
    }

    /// Dense matrix of `m*: M → M ⊗ M` in matrix-unit coordinates, with
    /// `m*(e^a_ij) = n_a⁻¹ Σ_k e^a_ik ⊗ e^a_kj`. Row index is `p·D + q` for
    /// `e_p ⊗ e_q`; intended for small algebras.
    pub fn mult_adjoint(&self) -> ComplexMatrix {
        let d = self.dimension();
        let mut m = ComplexMatrix::zeros(d * d, d);
        for (col, &(a, i, j)) in self.units().iter().enumerate() {
            let n = self.block_dims[a];
            for k in 0..n {
                let p = self.unit_index(a, i, k);
                let q = self.unit_index(a, k, j);
                m[(p * d + q, col)] += C64::new(1.0 / n as f64, 0.0);
            }
        }
        m
    }

    /// Multiplication `m: M ⊗ M → M` as a `D × D²` matrix.
    pub fn multiplication(&self) -> ComplexMatrix {
        let d = self.dimension();
        let units = self.units();
        let mut m = ComplexMatrix::zeros(d, d * d);
        for (p, &(a, i, k)) in units.iter().enumerate() {
            for (q, &(b, k2, j)) in units.iter().enumerate() {
                if a == b && k == k2 {
                    m[(self.unit_index(a, i, j), p * d + q)] = C64::new(1.0, 0.0);
                }
            }
        }
        m
    }
}

/// A linear operator on `M`, stored in the ψ-orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumGraph {
    algebra: MultiMatrixAlgebra,
    adjacency: ComplexMatrix,
}

/// Serialised quantum graph: `A` in the ψ-orthonormal basis, interleaved re/im.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuantumGraphFile {
    pub blocks: Vec<usize>,
    #[serde(rename = "A")]
    pub adjacency: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GapReport {
    pub degree: f64,
    /// Spectrum of `d⁻¹A`, descending.
    pub eigenvalues: Vec<f64>,
    pub lambda2: Option<f64>,
}

impl QuantumGraph {
    pub fn new(algebra: MultiMatrixAlgebra, adjacency: ComplexMatrix) -> Result<Self, QuantumGraphError> {
        let expected = algebra.dimension();
        if adjacency.rows() != expected || adjacency.cols() != expected {
            return Err(QuantumGraphError::DimensionMismatch {
                got: adjacency.rows(),
                expected,
            });
        }
        Ok(Self { algebra, adjacency })
    }

    /// From the matrix of `A` in matrix-unit coordinates (column `j` holds `A(e_j)`).
    pub fn from_unit_matrix(algebra: MultiMatrixAlgebra, a: &ComplexMatrix) -> Result<Self, QuantumGraphError> {
        let s = algebra.orthonormal_scales();
        if a.rows() != s.len() || a.cols() != s.len() {
            return Err(QuantumGraphError::DimensionMismatch {
                got: a.rows(),
                expected: s.len(),
            });
        }
        let ortho = ComplexMatrix::from_fn(s.len(), s.len(), |i, j| a[(i, j)] * (s[i] / s[j]));
        Self::new(algebra, ortho)
    }

    /// `scale·Φ` on `B(C^n)` with `ψ = n·Tr`. With a single block the
    /// orthonormal basis is a uniform rescaling of the matrix units, so the
    /// operator is the transfer matrix.
    pub fn from_channel(channel: &Channel, scale: f64) -> Self {
        let algebra = MultiMatrixAlgebra::new(vec![channel.dim()]);
        Self {
            algebra,
            adjacency: channel.transfer_matrix().scale_real(scale),
        }
    }

    /// A weighted operator on `ℓ∞(X)` with counting measure, as a quantum graph
    /// on `C^X`.
    pub fn commutative(adjacency: ComplexMatrix) -> Result<Self, QuantumGraphError> {
        Self::new(MultiMatrixAlgebra::new(vec![1; adjacency.rows()]), adjacency)
    }

    /// The complete quantum graph `x ↦ ψ(x)1`.
    pub fn complete(algebra: MultiMatrixAlgebra) -> Self {
        let one = algebra.unit();
        let units = algebra.units();
        let a = ComplexMatrix::from_fn(units.len(), units.len(), |row, col| {
            let (b, i, j) = units[col];
            let psi = if i == j { algebra.block_dims()[b] as f64 } else { 0.0 };
            one[row] * psi
        });
        Self::from_unit_matrix(algebra, &a).expect("dimensions agree")
    }

    pub fn from_file(file: &QuantumGraphFile) -> Result<Self, QuantumGraphError> {
        let algebra = MultiMatrixAlgebra::new(file.blocks.clone());
        let d = algebra.dimension();
        let a = ComplexMatrix::from_interleaved(d, d, &file.adjacency).ok_or(QuantumGraphError::DimensionMismatch {
            got: file.adjacency.len() / 2,
            expected: d * d,
        })?;
        Self::new(algebra, a)
    }

    pub fn to_file(&self) -> QuantumGraphFile {
        QuantumGraphFile {
            blocks: self.algebra.block_dims().to_vec(),
            adjacency: self.adjacency.to_interleaved(),
        }
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    /// `A` in the ψ-orthonormal basis.
    pub fn adjacency(&self) -> &ComplexMatrix {
        &self.adjacency
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            adjacency: self.adjacency.scale_real(s),
        }
    }

    /// `A` in matrix-unit coordinates.
    pub fn unit_matrix(&self) -> ComplexMatrix {
        let s = self.algebra.orthonormal_scales();
        ComplexMatrix::from_fn(s.len(), s.len(), |i, j| self.adjacency[(i, j)] * (s[j] / s[i]))
    }

    /// Applies `A` to matrix-unit coordinates.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.unit_matrix().mat_vec(x)
    }

    /// `m∘(A⊗A)∘m*` in the ψ-orthonormal basis, computed from
    /// `m(A⊗A)m*(e^a_ij) = n_a⁻¹ Σ_k A(e^a_ik)·A(e^a_kj)`.
    pub fn schur_square(&self) -> ComplexMatrix {
        let a = self.unit_matrix();
        let alg = &self.algebra;
        let d = alg.dimension();
        let columns = a.columns();
        let mut out = ComplexMatrix::zeros(d, d);
        for (col, &(b, i, j)) in alg.units().iter().enumerate() {
            let n = alg.block_dims()[b];
            let mut acc = vec![C64::new(0.0, 0.0); d];
            for k in 0..n {
                let prod = alg.multiply(&columns[alg.unit_index(b, i, k)], &columns[alg.unit_index(b, k, j)]);
                for (x, y) in acc.iter_mut().zip(prod) {
                    *x += y;
                }
            }
            for (row, v) in acc.into_iter().enumerate() {
                out[(row, col)] = v / n as f64;
            }
        }
        let s = alg.orthonormal_scales();
        ComplexMatrix::from_fn(d, d, |i, j| out[(i, j)] * (s[i] / s[j]))
    }

    /// Blockwise Choi test: for each input block `a` and output block `b`,
    /// `Σ_ij e_ij ⊗ [A(e^a_ij)]_b` must be positive semidefinite.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        let a = self.unit_matrix();
        let alg = &self.algebra;
        let dims = alg.block_dims();
        for (ia, &na) in dims.iter().enumerate() {
            for (ib, &nb) in dims.iter().enumerate() {
                let mut choi = ComplexMatrix::zeros(na * nb, na * nb);
                for i in 0..na {
                    for j in 0..na {
                        let col = alg.unit_index(ia, i, j);
                        for p in 0..nb {
                            for q in 0..nb {
                                choi[(i * nb + p, j * nb + q)] = a[(alg.unit_index(ib, p, q), col)];
                            }
                        }
                    }
                }
                match hermitian_eig(&choi, 1e-8) {
                    Ok(e) if e.values[0] >= -tol => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// `‖m(A⊗A)m* − A‖ ≤ tol` in operator norm on L²(M, ψ).
    pub fn is_quantum_adjacency(&self, tol: f64) -> bool {
        (&self.schur_square() - &self.adjacency).op_norm() <= tol
    }

    /// `Some(d)` when `A1 = A*1 = d1` within `tol`.
    pub fn is_regular(&self, tol: f64) -> Option<f64> {
        let s = self.algebra.orthonormal_scales();
        let one: Vec<C64> = self.algebra.unit().iter().zip(&s).map(|(x, w)| x * w).collect();
        let norm2: f64 = one.iter().map(|z| z.norm_sqr()).sum();
        let a_one = self.adjacency.mat_vec(&one);
        let d = crate::numerics::inner(&one, &a_one).re / norm2;
        let adj_one = self.adjacency.adjoint().mat_vec(&one);
        let close = |v: &[C64]| v.iter().zip(&one).all(|(x, y)| (x - y * d).norm() <= tol);
        (close(&a_one) && close(&adj_one)).then_some(d)
    }

    pub fn undirected_deviation(&self) -> f64 {
        self.adjacency.hermitian_deviation()
    }

    /// Spectrum of `d⁻¹A` for a regular undirected quantum graph.
    pub fn gap(&self) -> Result<GapReport, QuantumGraphError> {
        let degree = self.is_regular(1e-9).ok_or(QuantumGraphError::NotRegular)?;
        let dev = self.undirected_deviation();
        if dev > TOL_UNDIRECTED * degree.abs().max(1.0) {
            return Err(QuantumGraphError::NotUndirected(dev));
        }
        if degree.abs() < 1e-12 {
            return Err(QuantumGraphError::NotRegular);
        }
        let eig = hermitian_eig(&self.adjacency.scale_real(1.0 / degree).hermitian_part(), f64::INFINITY)
            .expect("Hermitian part");
        let mut eigenvalues = eig.values;
        eigenvalues.reverse();
        Ok(GapReport {
            degree,
            lambda2: eigenvalues.get(1).copied(),
            eigenvalues,
        })
    }

    /// `P_A = n⁻¹ Σ_ij e_ij ⊗ A(e_ij)` on a single full matrix block.
    pub fn normalized_choi(&self) -> Option<ComplexMatrix> {
        let [n] = self.algebra.block_dims() else {
            return None;
        };
        let n = *n;
        let a = self.unit_matrix();
        Some(ComplexMatrix::from_fn(n * n, n * n, |r, c| {
            let (i, p) = (r / n, r % n);
            let (j, q) = (c / n, c % n);
            a[(p * n + q, i * n + j)] / n as f64
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::lift_graph;
    use crate::graphs::{cycle_cover_decomposition, Graph};
    use crate::numerics::{is_projection, rank_eps};

    fn lifted_graph(g: &Graph) -> QuantumGraph {
        let d = g.regular_degree().unwrap() as f64;
        let ch = lift_graph(g, &cycle_cover_decomposition(g, 0).unwrap()).unwrap();
        QuantumGraph::from_channel(&ch, d)
    }

    fn random_element(alg: &MultiMatrixAlgebra, seed: u64) -> Vec<C64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        (0..alg.dimension())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let re = (state >> 33) as f64 / (1u64 << 31) as f64 - 0.5;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let im = (state >> 33) as f64 / (1u64 << 31) as f64 - 0.5;
                C64::new(re, im)
            })
            .collect()
    }

    #[test]
    fn mult_adjoint_is_adjoint_of_multiplication() {
        for dims in [vec![1], vec![1, 1], vec![2], vec![1, 2], vec![3, 1]] {
            let alg = MultiMatrixAlgebra::new(dims);
            let d = alg.dimension();
            let mstar = alg.mult_adjoint();
            let units = alg.units();
            for x in 0..d {
                for y in 0..d {
                    for z in 0..d {
                        let ex = unit_vec(d, x);
                        let ey = unit_vec(d, y);
                        let ez = unit_vec(d, z);
                        let rhs = alg.inner(&ex, &alg.multiply(&ey, &ez));
                        // ⟨m*(x), y⊗z⟩ with ψ⊗ψ weights
                        let wy = alg.block_dims()[units[y].0] as f64;
                        let wz = alg.block_dims()[units[z].0] as f64;
                        let lhs = mstar[(y * d + z, x)].conj() * wy * wz;
                        assert!((lhs - rhs).norm() < 1e-12);
                    }
                }
            }
            // m ∘ m* = id
            let mm = &alg.multiplication() * &mstar;
            assert!(mm.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
        }
    }

    fn unit_vec(d: usize, k: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[k] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn trivial_algebra_mult_adjoint() {
        let alg = MultiMatrixAlgebra::new(vec![1]);
        assert_eq!(alg.mult_adjoint()[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn full_matrix_mult_adjoint_weights() {
        let alg = MultiMatrixAlgebra::new(vec![3]);
        let m = alg.mult_adjoint();
        let col = alg.unit_index(0, 0, 2);
        let d = alg.dimension();
        for w in 0..3 {
            let row = alg.unit_index(0, 0, w) * d + alg.unit_index(0, w, 2);
            assert!((m[(row, col)] - 1.0 / 3.0).norm() < 1e-15);
        }
    }

    #[test]
    fn psi_is_tracial() {
        let alg = MultiMatrixAlgebra::new(vec![2, 1, 3]);
        let x = random_element(&alg, 1);
        let y = random_element(&alg, 2);
        let xy = alg.psi(&alg.multiply(&x, &y));
        let yx = alg.psi(&alg.multiply(&y, &x));
        assert!((xy - yx).norm() < 1e-12);
        assert!(alg.inner(&x, &x).re > 0.0);
    }

    #[test]
    fn lifted_graphs_are_quantum_graphs() {
        for g in [Graph::complete(4), Graph::petersen()] {
            let qg = lifted_graph(&g);
            let d = g.regular_degree().unwrap();
            assert!(qg.is_quantum_adjacency(1e-8));
            assert!(qg.is_completely_positive(1e-9));
            assert!((qg.is_regular(1e-9).unwrap() - d as f64).abs() < 1e-9);
            let p = qg.normalized_choi().unwrap();
            assert!(is_projection(&p, 1e-8));
            assert_eq!(rank_eps(&p, 1e-8).unwrap(), d);
            assert!(!qg.scaled(0.5).is_quantum_adjacency(1e-8));
        }
    }

    #[test]
    fn complete_quantum_graph() {
        let qg = QuantumGraph::complete(MultiMatrixAlgebra::new(vec![2]));
        assert!(qg.is_quantum_adjacency(1e-12));
        assert!((qg.is_regular(1e-12).unwrap() - 4.0).abs() < 1e-12);
        let gap = qg.gap().unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0];
        for (x, y) in gap.eigenvalues.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
        let multi = QuantumGraph::complete(MultiMatrixAlgebra::new(vec![1, 2]));
        assert!(multi.is_quantum_adjacency(1e-12));
        assert!(multi.is_completely_positive(1e-12));
        assert!((multi.is_regular(1e-12).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn lifted_cycle_gap_is_half() {
        let g = Graph::cycle(6);
        let qg = lifted_graph(&g);
        let gap = qg.gap().unwrap();
        assert!((gap.eigenvalues[0] - 1.0).abs() < 1e-9);
        // the lift of a cycle is disconnected: 1 has multiplicity 6, then cos(π/3)
        assert!((gap.eigenvalues[6] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_unital_map_is_not_regular() {
        let mut k = ComplexMatrix::zeros(2, 2);
        k[(0, 0)] = C64::new(1.0, 0.0);
        k[(0, 1)] = C64::new(1.0, 0.0);
        let ch = Channel::new(vec![k]).unwrap();
        assert!(QuantumGraph::from_channel(&ch, 1.0).is_regular(1e-9).is_none());
    }

    #[test]
    fn psi_bistochastic() {
        let qg = lifted_graph(&Graph::complete(4));
        let d = qg.is_regular(1e-9).unwrap();
        let alg = qg.algebra().clone();
        for k in 0..alg.dimension() {
            let e = unit_vec(alg.dimension(), k);
            let lhs = alg.psi(&qg.apply(&e));
            assert!((lhs - alg.psi(&e) * d).norm() < 1e-9);
        }
    }

    #[test]
    fn file_round_trip() {
        let qg = QuantumGraph::complete(MultiMatrixAlgebra::new(vec![1, 2]));
        assert_eq!(QuantumGraph::from_file(&qg.to_file()).unwrap(), qg);
    }
}
