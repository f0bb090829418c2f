//! Quantum bistochastic maps in Kraus form.
//!
//! Matrices on `B(K)` are vectorised row-major, `vec(ρ)[a·n + b] = ρ[a][b]`,
//! so that `vec(KρK†) = (K ⊗ conj K) vec(ρ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{permutation_matrix, spectral_data, cayley_graph, CycleCoverDecomposition, Graph, GraphError};
use crate::groups::{FiniteGroup, Irrep};
use crate::numerics::{
    hermitian_eig, inner, kron, orthonormalize, random_unitary, ComplexMatrix, NumericsError, C64, TOL_HERM,
};

/// Kraus sums must match the identity to this accuracy.
pub const TOL_CHANNEL: f64 = 1e-9;
/// Choi eigenvalues above this count toward the degree.
pub const TOL_DEGREE: f64 = 1e-8;
/// Eigenvalues of the transfer matrix above `1 − TOL_FIXED` are treated as 1.
pub const TOL_FIXED: f64 = 1e-7;
/// Choi eigenvalues at or below this are dropped from minimal Kraus families.
pub const TOL_KRAUS_DROP: f64 = 1e-10;

/// Largest dimension searched exhaustively over basis subsets.
const EXHAUSTIVE_SUBSET_DIM: usize = 12;
const GIVENS_STEPS: usize = 50;
const ANGLE_STEPS_THETA: usize = 16;
const ANGLE_STEPS_PHI: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("a channel needs at least one Kraus operator")]
    EmptyKraus,
    #[error("Kraus operators must all be square of one size")]
    DimensionMismatch,
    #[error("transfer matrix is not Hermitian (deviation {0:e})")]
    NotUndirected(f64),
    #[error("fixed-point space has dimension {0}, not 1")]
    NotConnected(usize),
    #[error("channel acts on a 1-dimensional space and has no second eigenvalue")]
    NoSecondEigenvalue,
    #[error("the trivial representation does not give a Harrow channel")]
    TrivialRep,
    #[error("block {index} is not unitary (deviation {deviation:e})")]
    NotUnitaryBlock { index: usize, deviation: f64 },
    #[error("state is not a faithful density: {0}")]
    NotFaithfulState(String),
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("graph has no edges to lift")]
    EmptyGraph,
    #[error("decomposition does not sum to the adjacency matrix")]
    InvalidDecomposition,
    #[error("certificate violated: lambda2 {lambda2} exceeds bound {bound}")]
    CertificateViolated { lambda2: f64, bound: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Completely positive map `ρ ↦ Σ K_i ρ K_i†` on `dim × dim` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Serialised channel: row-major Kraus operators with interleaved re/im.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelFile {
    pub dim: usize,
    pub kraus: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ValidationReport {
    pub cp: bool,
    pub tp: bool,
    pub unital: bool,
    pub undirected: bool,
    pub connected: bool,
    pub min_choi_eigenvalue: f64,
    pub tp_deviation: f64,
    pub unital_deviation: f64,
    pub undirected_deviation: f64,
    pub fixed_space_dim: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ExpansionEstimate {
    /// `½(1 − λ₂)` for undirected connected channels, 0 otherwise.
    pub lower_certificate: f64,
    /// Ratio `Tr[(I−Π)Φ(Π)] / min(TrΠ, Tr(I−Π))` of the best projector found.
    pub upper_estimate: f64,
    #[serde(skip)]
    pub witness_projector: ComplexMatrix,
    pub witness_rank: usize,
    pub trials_used: usize,
    pub lambda2: Option<f64>,
}

impl Channel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        let first = kraus.first().ok_or(ChannelError::EmptyKraus)?;
        let dim = first.rows();
        if kraus.iter().any(|k| k.rows() != dim || k.cols() != dim) {
            return Err(ChannelError::DimensionMismatch);
        }
        Ok(Self { dim, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// `ρ ↦ Σ_i w_i U_i ρ U_i†`.
    pub fn mixed_unitary(unitaries: &[ComplexMatrix], weights: &[f64]) -> Result<Self, ChannelError> {
        let kraus = unitaries
            .iter()
            .zip(weights)
            .map(|(u, &w)| u.scale_real(w.sqrt()))
            .collect();
        Self::new(kraus)
    }

    pub fn from_file(file: &ChannelFile) -> Result<Self, ChannelError> {
        let kraus = file
            .kraus
            .iter()
            .map(|k| {
                ComplexMatrix::from_interleaved(file.dim, file.dim, k)
                    .ok_or_else(|| ChannelError::Parse(format!("expected {} numbers per operator", 2 * file.dim * file.dim)))
            })
            .collect::<Result<_, _>>()?;
        Self::new(kraus)
    }

    pub fn to_file(&self) -> ChannelFile {
        ChannelFile {
            dim: self.dim,
            kraus: self.kraus.iter().map(ComplexMatrix::to_interleaved).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = &out + &(&(k * rho) * &k.adjoint());
        }
        out
    }

    /// Hilbert–Schmidt adjoint `X ↦ Σ K_i† X K_i`.
    pub fn apply_adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = &out + &(&(&k.adjoint() * x) * k);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Channel) -> Result<Channel, ChannelError> {
        if self.dim != other.dim {
            return Err(ChannelError::DimensionMismatch);
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a * b))
            .collect();
        Channel::new(kraus)
    }

    /// `J = Σ_ij e_ij ⊗ Φ(e_ij)`, i.e. `J[(i,a),(j,b)] = Σ_k K_k[a][i] conj(K_k[b][j])`.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut j = ComplexMatrix::zeros(n * n, n * n);
        for k in &self.kraus {
            for i in 0..n {
                for a in 0..n {
                    let left = k[(a, i)];
                    if left.re == 0.0 && left.im == 0.0 {
                        continue;
                    }
                    for jj in 0..n {
                        for b in 0..n {
                            j[(i * n + a, jj * n + b)] += left * k[(b, jj)].conj();
                        }
                    }
                }
            }
        }
        j
    }

    /// Kraus rank: number of Choi eigenvalues above `TOL_DEGREE`.
    pub fn degree(&self) -> usize {
        let eig = hermitian_eig(&self.choi(), TOL_HERM).expect("Choi matrix is Hermitian");
        eig.values.iter().filter(|&&x| x > TOL_DEGREE).count()
    }

    /// Kraus family of minimal size, read off the Choi eigendecomposition.
    pub fn minimal_kraus(&self) -> Channel {
        let n = self.dim;
        let eig = hermitian_eig(&self.choi(), TOL_HERM).expect("Choi matrix is Hermitian");
        let kraus: Vec<ComplexMatrix> = eig
            .values
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &x)| x > TOL_KRAUS_DROP)
            .map(|(m, &x)| {
                let s = x.sqrt();
                ComplexMatrix::from_fn(n, n, |a, i| eig.vectors[(i * n + a, m)] * s)
            })
            .collect();
        if kraus.is_empty() {
            return Channel {
                dim: n,
                kraus: vec![ComplexMatrix::zeros(n, n)],
            };
        }
        Channel { dim: n, kraus }
    }

    /// `Σ K_i ⊗ conj(K_i)`.
    pub fn transfer_matrix(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut t = ComplexMatrix::zeros(n * n, n * n);
        for k in &self.kraus {
            t = &t + &kron(k, &k.conj());
        }
        t
    }

    pub fn tp_deviation(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            s = &s + &(&k.adjoint() * k);
        }
        s.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    pub fn unital_deviation(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            s = &s + &(k * &k.adjoint());
        }
        s.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    pub fn is_bistochastic(&self) -> bool {
        self.tp_deviation() <= TOL_CHANNEL && self.unital_deviation() <= TOL_CHANNEL
    }

    /// Self-adjointness with respect to the Hilbert–Schmidt inner product.
    pub fn undirected_deviation(&self) -> f64 {
        self.transfer_matrix().hermitian_deviation()
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected_deviation() <= TOL_CHANNEL
    }

    /// Orthonormal basis (Hilbert–Schmidt) of `{X : Φ(X) = X}`.
    ///
    /// For a unital trace-preserving map the transfer matrix is a
    /// contraction, so `Tx = x` exactly when `⟨x, Re(T) x⟩ = ‖x‖²`: the
    /// fixed space is the top eigenspace of the Hermitian part.
    pub fn fixed_point_space(&self) -> Vec<ComplexMatrix> {
        let n = self.dim;
        let h = self.transfer_matrix().hermitian_part();
        let eig = hermitian_eig(&h, f64::INFINITY).expect("Hermitian part");
        (0..n * n)
            .filter(|&k| eig.values[k] > 1.0 - TOL_FIXED)
            .map(|k| ComplexMatrix::from_row_major(n, n, eig.vector(k)))
            .collect()
    }

    /// Orthonormal basis of the commutant `{X : K_i X = X K_i ∀i}`.
    pub fn kraus_commutant(&self) -> Vec<ComplexMatrix> {
        let n = self.dim;
        let id = ComplexMatrix::identity(n);
        let mut gram = ComplexMatrix::zeros(n * n, n * n);
        for k in &self.kraus {
            // vec(KX − XK) = (K ⊗ I − I ⊗ Kᵀ) vec X
            let l = &kron(k, &id) - &kron(&id, &k.transpose());
            gram = &gram + &(&l.adjoint() * &l);
        }
        let eig = hermitian_eig(&gram.hermitian_part(), f64::INFINITY).expect("Gram matrix");
        let cut = 1e-9 * eig.values.last().copied().unwrap_or(0.0).max(1.0);
        (0..n * n)
            .filter(|&k| eig.values[k] <= cut)
            .map(|k| ComplexMatrix::from_row_major(n, n, eig.vector(k)))
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let choi_eig = hermitian_eig(&self.choi(), TOL_HERM).expect("Choi matrix is Hermitian");
        let min_choi_eigenvalue = choi_eig.values[0];
        let tp_deviation = self.tp_deviation();
        let unital_deviation = self.unital_deviation();
        let undirected_deviation = self.undirected_deviation();
        let tp = tp_deviation <= TOL_CHANNEL;
        let unital = unital_deviation <= TOL_CHANNEL;
        let fixed_space_dim = if tp && unital {
            self.fixed_point_space().len()
        } else {
            0
        };
        ValidationReport {
            cp: min_choi_eigenvalue >= -TOL_CHANNEL,
            tp,
            unital,
            undirected: undirected_deviation <= TOL_CHANNEL,
            connected: tp && unital && fixed_space_dim == 1,
            min_choi_eigenvalue,
            tp_deviation,
            unital_deviation,
            undirected_deviation,
            fixed_space_dim,
        }
    }

    /// Eigenvalues of the Hermitian part of the transfer matrix, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let eig = hermitian_eig(&self.transfer_matrix().hermitian_part(), f64::INFINITY).expect("Hermitian part");
        let mut v = eig.values;
        v.reverse();
        v
    }

    /// Second-largest eigenvalue of the (Hermitian) transfer matrix.
    pub fn lambda2(&self) -> Result<f64, ChannelError> {
        let dev = self.undirected_deviation();
        if dev > TOL_CHANNEL {
            return Err(ChannelError::NotUndirected(dev));
        }
        if self.dim < 2 {
            return Err(ChannelError::NoSecondEigenvalue);
        }
        let fixed = self.fixed_point_space().len();
        if !self.is_bistochastic() || fixed != 1 {
            return Err(ChannelError::NotConnected(fixed));
        }
        Ok(self.spectrum()[1])
    }

    /// Second singular value of the transfer matrix.
    pub fn second_singular_value(&self) -> f64 {
        let t = self.transfer_matrix();
        let gram = (&t.adjoint() * &t).hermitian_part();
        let eig = hermitian_eig(&gram, f64::INFINITY).expect("Gram matrix");
        let m = eig.values.len();
        if m < 2 {
            return 0.0;
        }
        eig.values[m - 2].max(0.0).sqrt()
    }

    /// `Tr[(I−Π)Φ(Π)] / min(r, dim − r)` for a rank-`r` projector Π.
    pub fn edge_ratio(&self, projector: &ComplexMatrix, rank: usize) -> f64 {
        let image = self.apply(projector);
        let complement = &ComplexMatrix::identity(self.dim) - projector;
        let num = (&complement * &image).trace().re;
        num / rank.min(self.dim - rank) as f64
    }

    /// Best-found quantum edge expansion with the Cheeger lower certificate.
    ///
    /// Searched projectors: every subset of the standard basis and of the
    /// eigenbases of the Hermitian and anti-Hermitian parts of the leading
    /// transfer eigenvectors (sweep cuts only above dimension 12), then
    /// `budget` Haar-random starts per rank `1..=dim/2`, each improved by
    /// 50 Givens rotations between the range and its complement.
    pub fn estimate_hq(&self, budget: usize, seed: u64) -> ExpansionEstimate {
        let n = self.dim;
        let lambda2 = self.lambda2().ok();
        let lower_certificate = lambda2.map_or(0.0, |l| 0.5 * (1.0 - l));
        if n < 2 {
            return ExpansionEstimate {
                lower_certificate,
                upper_estimate: f64::INFINITY,
                witness_projector: ComplexMatrix::zeros(n, n),
                witness_rank: 0,
                trials_used: 0,
                lambda2,
            };
        }

        let mut bases = vec![(0..n)
            .map(|i| (0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect::<Vec<Vec<C64>>>()];
        let eig = hermitian_eig(&self.transfer_matrix().hermitian_part(), f64::INFINITY).expect("Hermitian part");
        let leading = (n * n).min(8);
        for k in (n * n - leading..n * n).rev() {
            let x = ComplexMatrix::from_row_major(n, n, eig.vector(k));
            let herm = x.hermitian_part();
            let anti = (&x - &x.adjoint()).scale(C64::new(0.0, 0.5));
            for part in [herm, anti] {
                if part.max_abs() < 1e-8 {
                    continue;
                }
                let e = hermitian_eig(&part, f64::INFINITY).expect("Hermitian part");
                bases.push(e.vectors.columns());
            }
        }

        let mut best: Option<(f64, Vec<Vec<C64>>)> = None;
        let mut trials = 0;
        for basis in &bases {
            let (ratio, subset, count) = self.best_basis_subset(basis);
            trials += count;
            if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
                best = Some((ratio, subset.iter().map(|&i| basis[i].clone()).collect()));
            }
        }

        let tasks: Vec<(usize, usize)> = (1..=n / 2).flat_map(|r| (0..budget).map(move |t| (r, t))).collect();
        let results: Vec<(f64, Vec<Vec<C64>>)> = tasks
            .par_iter()
            .enumerate()
            .map(|(stream, &(rank, _))| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream as u64);
                self.givens_descent(rank, &mut rng)
            })
            .collect();
        trials += results.len();
        for (ratio, y) in results {
            if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
                best = Some((ratio, y));
            }
        }

        let (_, columns) = best.expect("at least the standard basis was searched");
        let rank = columns.len();
        let witness = ComplexMatrix::from_fn(n, n, |i, j| columns.iter().map(|c| c[i] * c[j].conj()).sum());
        ExpansionEstimate {
            lower_certificate,
            upper_estimate: self.edge_ratio(&witness, rank),
            witness_projector: witness,
            witness_rank: rank,
            trials_used: trials,
            lambda2,
        }
    }

    /// Best proper subset of an orthonormal basis. Returns the ratio, the
    /// chosen indices and the number of subsets scored.
    fn best_basis_subset(&self, basis: &[Vec<C64>]) -> (f64, Vec<usize>, usize) {
        let n = self.dim;
        // w[i][j] = ⟨u_j|Φ(|u_i⟩⟨u_i|)|u_j⟩ = Σ_k |⟨u_j|K_k u_i⟩|²
        let mut w = vec![vec![0.0; n]; n];
        for k in &self.kraus {
            for (i, ui) in basis.iter().enumerate() {
                let ku = k.mat_vec(ui);
                for (j, uj) in basis.iter().enumerate() {
                    w[i][j] += inner(uj, &ku).norm_sqr();
                }
            }
        }
        let row: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
        let score = |out: f64, inside: f64, size: usize| (out - inside) / size.min(n - size) as f64;

        if n <= EXHAUSTIVE_SUBSET_DIM {
            let mut set = 0u32;
            let (mut out, mut inside, mut size) = (0.0, 0.0, 0usize);
            let mut best = (f64::INFINITY, 0u32);
            let total = 1u32 << (n - 1);
            for k in 1..total {
                let v = k.trailing_zeros() as usize;
                let cross: f64 = (0..n).filter(|&j| set & (1 << j) != 0 && j != v).map(|j| w[v][j] + w[j][v]).sum();
                if set & (1 << v) == 0 {
                    out += row[v];
                    inside += w[v][v] + cross;
                    size += 1;
                } else {
                    out -= row[v];
                    inside -= w[v][v] + cross;
                    size -= 1;
                }
                set ^= 1 << v;
                let r = score(out, inside, size);
                if r < best.0 {
                    best = (r, set);
                }
            }
            let chosen = (0..n).filter(|&i| best.1 & (1 << i) != 0).collect();
            (best.0, chosen, (total - 1) as usize)
        } else {
            let (mut out, mut inside) = (0.0, 0.0);
            let mut best = (f64::INFINITY, 0usize);
            for size in 1..n {
                let v = size - 1;
                let cross: f64 = (0..v).map(|j| w[v][j] + w[j][v]).sum();
                out += row[v];
                inside += w[v][v] + cross;
                let r = score(out, inside, size);
                if r < best.0 {
                    best = (r, size);
                }
            }
            ((best.0), (0..best.1).collect(), n - 1)
        }
    }

    /// Local search over rank-`rank` projectors from a Haar-random start.
    fn givens_descent(&self, rank: usize, rng: &mut ChaCha8Rng) -> (f64, Vec<Vec<C64>>) {
        let n = self.dim;
        let u = random_unitary(n, rng);
        let mut range: Vec<Vec<C64>> = (0..rank).map(|j| u.column(j)).collect();
        let mut complement: Vec<Vec<C64>> = (rank..n).map(|j| u.column(j)).collect();
        let kraus_adj: Vec<ComplexMatrix> = self.kraus.iter().map(ComplexMatrix::adjoint).collect();

        // F = Φ(Π), Fa = Φ†(Π)
        let mut f = ComplexMatrix::zeros(n, n);
        let mut fa = ComplexMatrix::zeros(n, n);
        for y in &range {
            add_rank_one_image(&mut f, &self.kraus, y, 1.0);
            add_rank_one_image(&mut fa, &kraus_adj, y, 1.0);
        }

        for step in 0..GIVENS_STEPS {
            let i = step % rank;
            let j = rng.random_range(0..n - rank);
            let (uvec, wvec) = (range[i].clone(), complement[j].clone());
            add_rank_one_image(&mut f, &self.kraus, &uvec, -1.0);
            add_rank_one_image(&mut fa, &kraus_adj, &uvec, -1.0);
            // Q(v) = Q₀ + ⟨v|F₀ + Fa₀|v⟩ + Σ_k |⟨v|K_k|v⟩|², with v = c·u + s·e^{iφ}·w.
            let g = &f + &fa;
            let gu = g.mat_vec(&uvec);
            let gw = g.mat_vec(&wvec);
            let guu = inner(&uvec, &gu).re;
            let gww = inner(&wvec, &gw).re;
            let guw = inner(&uvec, &gw);
            let ks: Vec<[C64; 4]> = self
                .kraus
                .iter()
                .map(|k| {
                    let ku = k.mat_vec(&uvec);
                    let kw = k.mat_vec(&wvec);
                    [inner(&uvec, &ku), inner(&wvec, &kw), inner(&uvec, &kw), inner(&wvec, &ku)]
                })
                .collect();
            let gain = |theta: f64, phi: f64| -> f64 {
                let (s, c) = theta.sin_cos();
                let e = C64::from_polar(1.0, phi);
                let mut q = c * c * guu + s * s * gww + 2.0 * c * s * (e * guw).re;
                for [kuu, kww, kuw, kwu] in &ks {
                    let z = kuu * (c * c) + kww * (s * s) + (kuw * e + kwu * e.conj()) * (c * s);
                    q += z.norm_sqr();
                }
                q
            };
            let mut best = (gain(0.0, 0.0), 0.0, 0.0);
            let dt = std::f64::consts::PI / ANGLE_STEPS_THETA as f64;
            let dp = 2.0 * std::f64::consts::PI / ANGLE_STEPS_PHI as f64;
            for a in 1..ANGLE_STEPS_THETA {
                for b in 0..ANGLE_STEPS_PHI {
                    let (t, p) = (a as f64 * dt, b as f64 * dp);
                    let q = gain(t, p);
                    if q > best.0 {
                        best = (q, t, p);
                    }
                }
            }
            let (mut st, mut sp) = (dt / 2.0, dp / 2.0);
            for _ in 0..4 {
                let (_, t0, p0) = best;
                for a in -2i32..=2 {
                    for b in -2i32..=2 {
                        let (t, p) = (t0 + a as f64 * st / 2.0, p0 + b as f64 * sp / 2.0);
                        let q = gain(t, p);
                        if q > best.0 {
                            best = (q, t, p);
                        }
                    }
                }
                st /= 2.0;
                sp /= 2.0;
            }
            let (_, theta, phi) = best;
            let (s, c) = theta.sin_cos();
            let e = C64::from_polar(1.0, phi);
            let v: Vec<C64> = uvec.iter().zip(&wvec).map(|(a, b)| a * c + b * e * s).collect();
            let z: Vec<C64> = uvec.iter().zip(&wvec).map(|(a, b)| -a * e.conj() * s + b * c).collect();
            add_rank_one_image(&mut f, &self.kraus, &v, 1.0);
            add_rank_one_image(&mut fa, &kraus_adj, &v, 1.0);
            range[i] = v;
            complement[j] = z;
        }
        let range = orthonormalize(&range, 1e-12);
        let projector = ComplexMatrix::from_fn(n, n, |a, b| range.iter().map(|c| c[a] * c[b].conj()).sum());
        (self.edge_ratio(&projector, rank), range)
    }
}

/// `target += sign · Σ_k (K_k y)(K_k y)†`.
fn add_rank_one_image(target: &mut ComplexMatrix, kraus: &[ComplexMatrix], y: &[C64], sign: f64) {
    let n = y.len();
    for k in kraus {
        let ky = k.mat_vec(y);
        for a in 0..n {
            let left = ky[a] * sign;
            for b in 0..n {
                target[(a, b)] += left * ky[b].conj();
            }
        }
    }
}

/// `Φ_G(ρ) = d⁻¹ Σ_i P_i ρ P_i†` for a cycle cover decomposition of `G`.
pub fn lift_graph(graph: &Graph, dec: &CycleCoverDecomposition) -> Result<Channel, ChannelError> {
    if dec.permutations.is_empty() || graph.edges().is_empty() {
        return Err(ChannelError::EmptyGraph);
    }
    if !dec.sums_to(graph) {
        return Err(ChannelError::InvalidDecomposition);
    }
    let scale = 1.0 / (dec.permutations.len() as f64).sqrt();
    Channel::new(
        dec.permutations
            .iter()
            .map(|p| permutation_matrix(p).scale_real(scale))
            .collect(),
    )
}

/// `ρ ↦ |S|⁻¹ Σ_{s∈S} π(s) ρ π(s)†`.
pub fn harrow_channel(irrep: &Irrep, set: &[usize]) -> Result<Channel, ChannelError> {
    if irrep.is_trivial(1e-8) {
        return Err(ChannelError::TrivialRep);
    }
    let scale = 1.0 / (set.len() as f64).sqrt();
    Channel::new(set.iter().map(|&s| irrep.matrix(s).scale_real(scale)).collect())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HarrowReport {
    pub irrep_dim: usize,
    /// Absent for 1-dimensional representations.
    pub lambda2: Option<f64>,
    pub cayley_lambda2: f64,
    /// `λ₂(Cayley(Γ, S)) / |S|`
    pub bound: f64,
    pub degree: usize,
    pub holds: bool,
}

/// Compares `λ₂` of the Harrow channel with the normalised Cayley gap.
pub fn harrow_bound(group: &FiniteGroup, irrep: &Irrep, set: &[usize]) -> Result<HarrowReport, ChannelError> {
    let channel = harrow_channel(irrep, set)?;
    let cayley = spectral_data(&cayley_graph(group, set)?);
    let cayley_lambda2 = cayley.lambda2.unwrap_or(f64::NEG_INFINITY);
    let bound = cayley_lambda2 / set.len() as f64;
    let lambda2 = match channel.lambda2() {
        Ok(l) => Some(l),
        Err(ChannelError::NoSecondEigenvalue) => None,
        Err(e) => return Err(e),
    };
    Ok(HarrowReport {
        irrep_dim: irrep.dimension(),
        lambda2,
        cayley_lambda2,
        bound,
        degree: channel.degree(),
        holds: lambda2.is_none_or(|l| l <= bound + TOL_CHANNEL),
    })
}

/// One summand of a representation channel: a unitary on `H_s ⊗ K`
/// together with the restriction of the state to `B(H_s)`.
#[derive(Clone, Debug)]
pub struct RepBlock {
    pub unitary: ComplexMatrix,
    pub state: ComplexMatrix,
}

/// `Ψ(ρ) = Σ_s Σ_{a,c} λ_{a,s} U^s_{ac} ρ (U^s_{ac})†` after diagonalising each
/// state block, where `U^s_{ac}` is the `(a, c)` block of `U^s` on `K`.
pub fn rep_channel(blocks: &[RepBlock]) -> Result<Channel, ChannelError> {
    block_channel(blocks, true)
}

pub(crate) fn block_channel(blocks: &[RepBlock], faithful: bool) -> Result<Channel, ChannelError> {
    let mut kraus = Vec::new();
    let mut total_trace = 0.0;
    let mut k_dim = None;
    for (index, block) in blocks.iter().enumerate() {
        let h = block.state.rows();
        if h == 0 || !block.state.is_square() || block.unitary.rows() % h != 0 || !block.unitary.is_square() {
            return Err(ChannelError::DimensionMismatch);
        }
        let k = block.unitary.rows() / h;
        if *k_dim.get_or_insert(k) != k {
            return Err(ChannelError::DimensionMismatch);
        }
        let u = &block.unitary;
        let deviation = (&u.adjoint() * u)
            .max_abs_diff(&ComplexMatrix::identity(h * k))
            .max((u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(h * k)));
        if deviation > 1e-8 {
            return Err(ChannelError::NotUnitaryBlock { index, deviation });
        }
        let eig = hermitian_eig(&block.state, TOL_HERM).map_err(|e| {
            if faithful {
                ChannelError::NotFaithfulState(e.to_string())
            } else {
                ChannelError::NotAState(e.to_string())
            }
        })?;
        let min = eig.values[0];
        if (faithful && min <= 1e-12) || min < -1e-12 {
            let msg = format!("block {index} has eigenvalue {min:e}");
            return Err(if faithful {
                ChannelError::NotFaithfulState(msg)
            } else {
                ChannelError::NotAState(msg)
            });
        }
        total_trace += eig.values.iter().sum::<f64>();
        // rows of (W† ⊗ I)·U
        let rotated = &kron(&eig.vectors.adjoint(), &ComplexMatrix::identity(k)) * u;
        for (m, &lambda) in eig.values.iter().enumerate() {
            if lambda <= 1e-14 {
                continue;
            }
            let s = lambda.sqrt();
            for c in 0..h {
                kraus.push(ComplexMatrix::from_fn(k, k, |i, j| rotated[(m * k + i, c * k + j)] * s));
            }
        }
    }
    if (total_trace - 1.0).abs() > 1e-9 {
        let msg = format!("total trace {total_trace} is not 1");
        return Err(if faithful {
            ChannelError::NotFaithfulState(msg)
        } else {
            ChannelError::NotAState(msg)
        });
    }
    Channel::new(kraus)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GapCertificate {
    pub eps: f64,
    pub dim_he: usize,
    pub lambda_min: f64,
    pub tracial: bool,
    pub lambda2: Option<f64>,
    /// `1 − λ_min ε² / 2`
    pub lambda2_bound: f64,
    pub lower_certificate: Option<f64>,
    /// `λ_min ε² / 4`
    pub expansion_bound: f64,
    pub holds: bool,
}

/// Spectral and expansion bounds implied by a Kazhdan constant `eps`,
/// for a state whose smallest eigenvalue is `lambda_min` (defaults to the
/// tracial value `1/dim_he`).
pub fn gap_bounds(eps: f64, dim_he: usize, lambda_min: Option<f64>) -> (f64, f64, f64) {
    let lambda_min = lambda_min.unwrap_or(1.0 / dim_he as f64);
    (lambda_min, 1.0 - lambda_min * eps * eps / 2.0, lambda_min * eps * eps / 4.0)
}

/// Checks `λ₂ ≤ 1 − λ_min ε²/2` and `½(1 − λ₂) ≥ λ_min ε²/4`.
pub fn check_gap_certificate(
    channel: &Channel,
    eps: f64,
    dim_he: usize,
    lambda_min: Option<f64>,
) -> Result<GapCertificate, ChannelError> {
    let (lmin, lambda2_bound, expansion_bound) = gap_bounds(eps, dim_he, lambda_min);
    let lambda2 = match channel.lambda2() {
        Ok(l) => Some(l),
        Err(ChannelError::NoSecondEigenvalue) => None,
        Err(e) => return Err(e),
    };
    let lower_certificate = lambda2.map(|l| 0.5 * (1.0 - l));
    let holds = lambda2.is_none_or(|l| l <= lambda2_bound + TOL_CHANNEL)
        && lower_certificate.is_none_or(|h| h >= expansion_bound - TOL_CHANNEL);
    if !holds {
        return Err(ChannelError::CertificateViolated {
            lambda2: lambda2.unwrap_or(f64::NAN),
            bound: lambda2_bound,
        });
    }
    Ok(GapCertificate {
        eps,
        dim_he,
        lambda_min: lmin,
        tracial: (lmin - 1.0 / dim_he as f64).abs() < 1e-12,
        lambda2,
        lambda2_bound,
        lower_certificate,
        expansion_bound,
        holds,
    })
}
