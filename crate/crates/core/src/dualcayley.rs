//! Quantum Cayley and Schreier graphs over the dual of a finite group.
//!
//! Elements of `ℓ∞(Ĝ) = vN(G) = ⊕_x B(H_x)` are stored as group-algebra
//! coefficients `a = Σ_g c_g λ_g`; block forms `a_x = Σ_g c_g π_x(g)` are
//! computed on demand. The Haar weight is `ĥ(a) = |G|·c_e = Σ_x dim x·Tr(a_x)`,
//! which is the functional `ψ` of the multimatrix algebra with blocks `dim x`.

use serde::Serialize;
use thiserror::Error;

use crate::groups::{character_inner, irreps, FiniteGroup, GroupError, Irrep};
use crate::numerics::{ComplexMatrix, C64};
use crate::qgraphs::{MultiMatrixAlgebra, QuantumGraph, QuantumGraphError};

const TOL_INVARIANT: f64 = 1e-10;
const TOL_CHARACTER: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualCayleyError {
    #[error("the irrep set is not closed under conjugation")]
    NotSymmetric,
    #[error("the irrep set contains the trivial representation")]
    ContainsTrivial,
    #[error("the irrep set is empty")]
    EmptySet,
    #[error("irrep index {0} out of range")]
    InvalidIrrep(usize),
    #[error("the operator does not leave the coideal invariant (leak {0:e})")]
    NotInvariant(f64),
    #[error("λ₂ = {lambda2} exceeds the certified bound {bound}")]
    CertificateViolated { lambda2: f64, bound: f64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    QuantumGraph(#[from] QuantumGraphError),
}

/// `vN(G)` together with a complete list of unitary irreps.
#[derive(Clone, Debug)]
pub struct DualGroupAlgebra {
    group: FiniteGroup,
    irreps: Vec<Irrep>,
}

/// The coideal `span{λ_h : h ∈ H}` of a subgroup `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coideal {
    pub elements: Vec<usize>,
}

impl Coideal {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SchreierCertificate {
    pub degree: f64,
    pub lambda2: Option<f64>,
    /// `min_s dim H_s / d`.
    pub weight: f64,
    pub eps: f64,
    pub bound: f64,
    pub holds: bool,
}

impl DualGroupAlgebra {
    /// Panics unless `irreps` has one matrix per group element and
    /// `Σ (dim x)² = |G|`.
    pub fn new(group: FiniteGroup, irreps: Vec<Irrep>) -> Self {
        assert!(irreps.iter().all(|x| x.matrices().len() == group.order()));
        assert_eq!(irreps.iter().map(|x| x.dimension().pow(2)).sum::<usize>(), group.order());
        Self { group, irreps }
    }

    pub fn from_group(group: FiniteGroup, seed: u64) -> Result<Self, GroupError> {
        let irreps = irreps(&group, seed, 1e-9)?;
        Ok(Self::new(group, irreps))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn irrep_dims(&self) -> Vec<usize> {
        self.irreps.iter().map(Irrep::dimension).collect()
    }

    pub fn block_algebra(&self) -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::new(self.irrep_dims())
    }

    pub fn basis(&self, g: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.order()];
        v[g] = C64::new(1.0, 0.0);
        v
    }

    /// `(ab)_g = Σ_h a_h b_{h⁻¹g}`.
    pub fn multiply(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.order()];
        for (h, &ah) in a.iter().enumerate() {
            if ah.norm_sqr() == 0.0 {
                continue;
            }
            for (k, &bk) in b.iter().enumerate() {
                out[self.group.mul(h, k)] += ah * bk;
            }
        }
        out
    }

    /// `(a*)_g = conj(a_{g⁻¹})`.
    pub fn star(&self, a: &[C64]) -> Vec<C64> {
        (0..self.order()).map(|g| a[self.group.inv(g)].conj()).collect()
    }

    /// `Ŝ(λ_g) = λ_{g⁻¹}`.
    pub fn antipode(&self, a: &[C64]) -> Vec<C64> {
        (0..self.order()).map(|g| a[self.group.inv(g)]).collect()
    }

    /// `ε̂(λ_g) = 1`.
    pub fn counit(&self, a: &[C64]) -> C64 {
        a.iter().sum()
    }

    /// `ĥ(a) = |G|·c_e`.
    pub fn haar(&self, a: &[C64]) -> C64 {
        a[self.group.identity()] * self.order() as f64
    }

    pub fn block_form(&self, a: &[C64]) -> Vec<ComplexMatrix> {
        self.irreps
            .iter()
            .map(|x| {
                let d = x.dimension();
                let mut m = ComplexMatrix::zeros(d, d);
                for (g, &c) in a.iter().enumerate() {
                    if c.norm_sqr() != 0.0 {
                        m = &m + &x.matrix(g).scale(c);
                    }
                }
                m
            })
            .collect()
    }

    /// Fourier inversion `c_g = |G|⁻¹ Σ_x dim x·Tr(π_x(g)* a_x)`.
    pub fn from_block_form(&self, blocks: &[ComplexMatrix]) -> Vec<C64> {
        let n = self.order() as f64;
        (0..self.order())
            .map(|g| {
                self.irreps
                    .iter()
                    .zip(blocks)
                    .map(|(x, b)| (&x.matrix(g).adjoint() * b).trace() * x.dimension() as f64)
                    .sum::<C64>()
                    / n
            })
            .collect()
    }

    /// The unitary taking coefficients in the orthonormal basis `λ_g/√|G|`
    /// to ψ-orthonormal matrix-unit coordinates: column `g` holds
    /// `√dim x·π_x(g)_ij / √|G|`.
    pub fn fourier_matrix(&self) -> ComplexMatrix {
        let alg = self.block_algebra();
        let units = alg.units();
        let n = self.order() as f64;
        ComplexMatrix::from_fn(units.len(), self.order(), |row, g| {
            let (x, i, j) = units[row];
            self.irreps[x].matrix(g)[(i, j)] * (self.irreps[x].dimension() as f64 / n).sqrt()
        })
    }

    fn check_set(&self, set: &[usize]) -> Result<(), DualCayleyError> {
        if set.is_empty() {
            return Err(DualCayleyError::EmptySet);
        }
        if let Some(&bad) = set.iter().find(|&&x| x >= self.irreps.len()) {
            return Err(DualCayleyError::InvalidIrrep(bad));
        }
        Ok(())
    }

    /// Index of the irrep equivalent to the conjugate of irrep `x`.
    pub fn conjugate_index(&self, x: usize) -> usize {
        let target: Vec<C64> = self.irreps[x].character().iter().map(|c| c.conj()).collect();
        self.irreps
            .iter()
            .position(|y| {
                let c = character_inner(&y.character(), &target);
                (c - 1.0).norm() < 1e-6
            })
            .expect("irrep list is complete")
    }

    /// `Ŝ(p_E) = p_E`.
    pub fn is_symmetric(&self, set: &[usize]) -> bool {
        set.iter().all(|&x| set.contains(&self.conjugate_index(x)))
    }

    /// `p_E = Σ_{x∈E} p_x` with `c_g = Σ_{x∈E} (dim x/|G|)·conj(χ_x(g))`.
    pub fn central_projection(&self, set: &[usize]) -> Vec<C64> {
        let n = self.order() as f64;
        let mut c = vec![C64::new(0.0, 0.0); self.order()];
        for &x in set {
            let dim = self.irreps[x].dimension() as f64;
            for (cg, chi) in c.iter_mut().zip(self.irreps[x].character()) {
                *cg += chi.conj() * (dim / n);
            }
        }
        c
    }

    /// `a ⋆ b = (ω_a∘Ŝ ⊗ id)Δ̂(b)` with `ω_a = ĥ(·a)`; in the λ-basis this is
    /// the pointwise product `(a⋆b)_g = |G|·a_g·b_g`.
    pub fn convolve(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let n = self.order() as f64;
        a.iter().zip(b).map(|(x, y)| x * y * n).collect()
    }

    /// `n_E(g) = Σ_{x∈E} dim x·conj(χ_x(g)) = |G|·(p_E)_g`, the eigenvalue of
    /// `x ↦ p_E ⋆ x` on `λ_g`.
    pub fn cayley_eigenvalues(&self, set: &[usize]) -> Vec<C64> {
        let n = self.order() as f64;
        self.central_projection(set).iter().map(|c| c * n).collect()
    }

    /// `Ax = p_E ⋆ x` as a quantum graph on `⊕_x M_{dim x}`.
    pub fn quantum_cayley(&self, set: &[usize]) -> Result<QuantumGraph, DualCayleyError> {
        self.check_set(set)?;
        if set.iter().any(|&x| self.irreps[x].is_trivial(TOL_CHARACTER)) {
            return Err(DualCayleyError::ContainsTrivial);
        }
        if !self.is_symmetric(set) {
            return Err(DualCayleyError::NotSymmetric);
        }
        let eig = self.cayley_eigenvalues(set);
        let f = self.fourier_matrix();
        let scaled = ComplexMatrix::from_fn(f.rows(), f.cols(), |i, g| f[(i, g)] * eig[g].re);
        let a = &scaled * &f.adjoint();
        Ok(QuantumGraph::new(self.block_algebra(), a)?)
    }

    /// `n_E(g) < d` for every `g ≠ e`, with `d = Σ_{x∈E} (dim x)²`.
    pub fn is_generating(&self, set: &[usize]) -> bool {
        let eig = self.cayley_eigenvalues(set);
        let d = eig[self.group.identity()].re;
        eig.iter()
            .enumerate()
            .all(|(g, v)| g == self.group.identity() || v.re < d - TOL_CHARACTER)
    }

    pub fn coideal_from_subgroup(&self, subgroup: &[usize]) -> Result<Coideal, DualCayleyError> {
        if !self.group.is_subgroup(subgroup) {
            return Err(GroupError::NotASubgroup.into());
        }
        let mut elements = subgroup.to_vec();
        elements.sort_unstable();
        elements.dedup();
        Ok(Coideal { elements })
    }

    /// Restriction of a quantum graph on `vN(G)` to `span{λ_h : h ∈ H} ≅ vN(H)`,
    /// re-expressed over the irreps of `H`.
    pub fn schreier_restrict(
        &self,
        graph: &QuantumGraph,
        coideal: &Coideal,
        seed: u64,
    ) -> Result<QuantumGraph, DualCayleyError> {
        let f = self.fourier_matrix();
        let a_lambda = &(&f.adjoint() * graph.adjacency()) * &f;
        let inside: Vec<bool> = (0..self.order()).map(|g| coideal.elements.contains(&g)).collect();
        let scale = a_lambda.max_abs().max(1.0);
        let mut leak = 0.0f64;
        for &h in &coideal.elements {
            for g in (0..self.order()).filter(|&g| !inside[g]) {
                leak = leak.max(a_lambda[(g, h)].norm());
            }
        }
        if leak > TOL_INVARIANT * scale {
            return Err(DualCayleyError::NotInvariant(leak));
        }

        let (sub, embed) = self.group.subgroup_as_group(&coideal.elements)?;
        let local = Self::from_group(sub, seed)?;
        let k = embed.len();
        let a_res = ComplexMatrix::from_fn(k, k, |i, j| a_lambda[(embed[i], embed[j])]);
        let fh = local.fourier_matrix();
        let ortho = &(&fh * &a_res) * &fh.adjoint();
        Ok(QuantumGraph::new(local.block_algebra(), ortho)?)
    }

    /// Kazhdan constant for `E` from the mean over `E`:
    /// `ε² = min_{g≠e} |E|⁻¹ Σ_{x∈E} 2(1 − Re χ_x(g)/dim x)`.
    ///
    /// The characters of `vN(G)` are the evaluations at group elements, and
    /// `1 − Re χ_x(g)/dim x` is the mean of `1 − Re⟨ξ, π_x(g)ξ⟩` over an
    /// orthonormal basis of `H_x`.
    pub fn dual_kazhdan_constant(&self, set: &[usize]) -> Result<f64, DualCayleyError> {
        self.check_set(set)?;
        if self.order() == 1 {
            return Err(GroupError::TrivialGroup.into());
        }
        let chars: Vec<Vec<C64>> = set.iter().map(|&x| self.irreps[x].character()).collect();
        let dims: Vec<f64> = set.iter().map(|&x| self.irreps[x].dimension() as f64).collect();
        let eps2 = (0..self.order())
            .filter(|&g| g != self.group.identity())
            .map(|g| {
                chars
                    .iter()
                    .zip(&dims)
                    .map(|(chi, d)| 2.0 * (1.0 - chi[g].re / d))
                    .sum::<f64>()
                    / set.len() as f64
            })
            .fold(f64::INFINITY, f64::min);
        // rounding residue of an exactly fixed element
        Ok(if eps2 < 1e-12 { 0.0 } else { eps2.sqrt() })
    }
}

/// `Af(g) = Σ_{s∈E} f(sg)` on functions constant on left cosets `gH`, in the
/// basis of coset indicators ordered as in [`crate::groups::cosets`]:
/// entry `(i, j)` is `(A 1_{C_j})` evaluated on `C_i`.
pub fn classical_cayley_operator(
    group: &FiniteGroup,
    set: &[usize],
    subgroup: &[usize],
) -> Result<Vec<Vec<u32>>, GroupError> {
    if !group.is_symmetric(set) {
        return Err(GroupError::NotSymmetric);
    }
    if set.contains(&group.identity()) {
        return Err(GroupError::ContainsIdentity);
    }
    let classes = crate::groups::cosets(group, subgroup)?;
    let mut coset_of = vec![0; group.order()];
    for (i, c) in classes.iter().enumerate() {
        for &g in c {
            coset_of[g] = i;
        }
    }
    let k = classes.len();
    Ok(classes
        .iter()
        .map(|c| {
            (0..k)
                .map(|j| set.iter().filter(|&&s| coset_of[group.mul(s, c[0])] == j).count() as u32)
                .collect()
        })
        .collect())
}

/// Checks `λ₂(M, E) ≤ 1 − λε²/2` with `λ = min_s dim H_s / d`.
pub fn schreier_gap_certificate(
    restricted: &QuantumGraph,
    eps: f64,
    set_dims: &[usize],
) -> Result<SchreierCertificate, DualCayleyError> {
    let gap = restricted.gap()?;
    let min_dim = set_dims.iter().copied().min().unwrap_or(0) as f64;
    let weight = min_dim / gap.degree;
    let bound = 1.0 - weight * eps * eps / 2.0;
    let holds = gap.lambda2.is_none_or(|l| l <= bound + 1e-9);
    let cert = SchreierCertificate {
        degree: gap.degree,
        lambda2: gap.lambda2,
        weight,
        eps,
        bound,
        holds,
    };
    match cert.lambda2 {
        Some(l) if !holds => Err(DualCayleyError::CertificateViolated { lambda2: l, bound }),
        _ => Ok(cert),
    }
}
