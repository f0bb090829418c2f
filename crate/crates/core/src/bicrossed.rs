//! Matched pairs of finite groups and the channels of their bicrossed products.
//!
//! An exact factorization `H = ΓG` (with `Γ ∩ G = {e}`) determines actions
//! through `γg = α_γ(g)·β_g(γ)`. Elements of `Γ` and `G` are addressed by their
//! position in the sorted element lists of the two subgroups; position 0 is
//! the identity in both.

use serde::Serialize;
use thiserror::Error;

use crate::channels::{block_channel, Channel, ChannelError, RepBlock};
use crate::graphs::permutation_matrix;
use crate::groups::{FiniteGroup, GroupError};
use crate::numerics::{ComplexMatrix, C64};

const TOL_PVM: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BicrossedError {
    #[error("not an exact factorization: {0}")]
    NotExactFactorization(String),
    #[error("matched-pair identity fails: {0}")]
    InvariantViolated(String),
    #[error("the given elements are not a full β-orbit")]
    NotAnOrbit,
    #[error("not a projection-valued measure: {0}")]
    NotAPVM(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Clone, Debug)]
pub struct MatchedPair {
    ambient: FiniteGroup,
    gamma_part: Vec<usize>,
    g_part: Vec<usize>,
    /// `alpha[γ][g] = α_γ(g)`.
    alpha: Vec<Vec<usize>>,
    /// `beta[g][γ] = β_g(γ)`.
    beta: Vec<Vec<usize>>,
}

/// `entries[r][s][g]` is true iff `β_g(orbit[r]) = orbit[s]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagicUnitary {
    pub orbit: Vec<usize>,
    pub entries: Vec<Vec<Vec<bool>>>,
}

impl MagicUnitary {
    pub fn size(&self) -> usize {
        self.orbit.len()
    }

    /// Every row and every column partitions `G`.
    pub fn is_magic(&self) -> bool {
        let m = self.size();
        let n = self.entries.first().and_then(|r| r.first()).map_or(0, Vec::len);
        (0..m).all(|r| (0..n).all(|g| (0..m).filter(|&s| self.entries[r][s][g]).count() == 1))
            && (0..m).all(|s| (0..n).all(|g| (0..m).filter(|&r| self.entries[r][s][g]).count() == 1))
    }

    /// `diag(1_{A_rs})` on `ℓ²(G)`.
    pub fn projection(&self, r: usize, s: usize) -> ComplexMatrix {
        let values: Vec<C64> = self.entries[r][s]
            .iter()
            .map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0))
            .collect();
        ComplexMatrix::diagonal(&values)
    }
}

/// A unitary `U = Σ_k e^{2πik/n} p_k` and the largest deviation of
/// `n⁻¹ Σ_k U^k ρ U^{−k}` from `Σ_k p_k ρ p_k` over matrix units `ρ = e_ij`.
#[derive(Clone, Debug)]
pub struct PhaseUnitary {
    pub unitary: ComplexMatrix,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BicrossedReport {
    pub gamma_order: usize,
    pub g_order: usize,
    pub orbits: Vec<Vec<usize>>,
    pub orbit: Vec<usize>,
    pub magic: bool,
    pub v_unitarity_defect: f64,
    pub tp_deviation: f64,
    pub unital_deviation: f64,
    pub kraus_rank: usize,
    pub commutant_dimension: usize,
    pub mixed_unitary_deviation: Option<f64>,
    pub second_singular_value: f64,
}

impl MatchedPair {
    /// Extracts `α` and `β` from `H = ΓG` and checks every matched-pair identity.
    pub fn from_factorization(
        ambient: FiniteGroup,
        gamma_part: &[usize],
        g_part: &[usize],
    ) -> Result<Self, BicrossedError> {
        for part in [gamma_part, g_part] {
            if !ambient.is_subgroup(part) {
                return Err(GroupError::NotASubgroup.into());
            }
        }
        let mut gamma_part = gamma_part.to_vec();
        let mut g_part = g_part.to_vec();
        gamma_part.sort_unstable();
        gamma_part.dedup();
        g_part.sort_unstable();
        g_part.dedup();
        if gamma_part.len() * g_part.len() != ambient.order() {
            return Err(BicrossedError::NotExactFactorization(format!(
                "|Γ|·|G| = {} but |H| = {}",
                gamma_part.len() * g_part.len(),
                ambient.order()
            )));
        }
        if gamma_part.iter().any(|x| *x != ambient.identity() && g_part.contains(x)) {
            return Err(BicrossedError::NotExactFactorization("Γ ∩ G is nontrivial".into()));
        }

        // every element of H is uniquely g'γ'
        let mut split = vec![None; ambient.order()];
        for (gi, &g) in g_part.iter().enumerate() {
            for (ci, &c) in gamma_part.iter().enumerate() {
                split[ambient.mul(g, c)] = Some((gi, ci));
            }
        }
        let split: Vec<(usize, usize)> = split
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| BicrossedError::NotExactFactorization("GΓ ≠ H".into()))?;

        let mut alpha = vec![vec![0; g_part.len()]; gamma_part.len()];
        let mut beta = vec![vec![0; gamma_part.len()]; g_part.len()];
        for (ci, &c) in gamma_part.iter().enumerate() {
            for (gi, &g) in g_part.iter().enumerate() {
                let (a, b) = split[ambient.mul(c, g)];
                alpha[ci][gi] = a;
                beta[gi][ci] = b;
            }
        }
        let mp = Self {
            ambient,
            gamma_part,
            g_part,
            alpha,
            beta,
        };
        mp.verify()?;
        Ok(mp)
    }

    fn verify(&self) -> Result<(), BicrossedError> {
        let fail = |what: &str| Err(BicrossedError::InvariantViolated(what.into()));
        let (nc, ng) = (self.gamma_order(), self.g_order());
        let gmul = |a: usize, b: usize| self.g_index(self.ambient.mul(self.g_part[a], self.g_part[b]));
        let cmul = |a: usize, b: usize| self.gamma_index(self.ambient.mul(self.gamma_part[a], self.gamma_part[b]));
        if (0..ng).any(|g| self.alpha(0, g) != g) || (0..nc).any(|c| self.beta(0, c) != c) {
            return fail("identity acts trivially");
        }
        for c in 0..nc {
            for c2 in 0..nc {
                for g in 0..ng {
                    if self.alpha(cmul(c, c2), g) != self.alpha(c, self.alpha(c2, g)) {
                        return fail("α_{γγ'} = α_γ∘α_{γ'}");
                    }
                    let lhs = self.beta(g, cmul(c, c2));
                    let rhs = cmul(self.beta(self.alpha(c2, g), c), self.beta(g, c2));
                    if lhs != rhs {
                        return fail("β_g(γγ') = β_{α_{γ'}(g)}(γ)·β_g(γ')");
                    }
                }
            }
        }
        for g in 0..ng {
            for h in 0..ng {
                for c in 0..nc {
                    if self.beta(gmul(g, h), c) != self.beta(h, self.beta(g, c)) {
                        return fail("β_{gh} = β_h∘β_g");
                    }
                    if self.alpha(c, gmul(g, h)) != gmul(self.alpha(c, g), self.alpha(self.beta(g, c), h)) {
                        return fail("α_γ(gh) = α_γ(g)·α_{β_g(γ)}(h)");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> &FiniteGroup {
        &self.ambient
    }

    /// Ambient indices of `Γ`, sorted.
    pub fn gamma_elements(&self) -> &[usize] {
        &self.gamma_part
    }

    /// Ambient indices of `G`, sorted.
    pub fn g_elements(&self) -> &[usize] {
        &self.g_part
    }

    pub fn gamma_order(&self) -> usize {
        self.gamma_part.len()
    }

    pub fn g_order(&self) -> usize {
        self.g_part.len()
    }

    pub fn gamma_index(&self, ambient: usize) -> usize {
        self.gamma_part.binary_search(&ambient).expect("element of Γ")
    }

    pub fn g_index(&self, ambient: usize) -> usize {
        self.g_part.binary_search(&ambient).expect("element of G")
    }

    pub fn alpha(&self, gamma: usize, g: usize) -> usize {
        self.alpha[gamma][g]
    }

    pub fn beta(&self, g: usize, gamma: usize) -> usize {
        self.beta[g][gamma]
    }

    pub fn is_beta_trivial(&self) -> bool {
        self.beta.iter().all(|row| row.iter().enumerate().all(|(c, &b)| b == c))
    }

    pub fn is_alpha_trivial(&self) -> bool {
        self.alpha.iter().all(|row| row.iter().enumerate().all(|(g, &a)| a == g))
    }

    /// `{β_g(γ) : g ∈ G}`, sorted.
    pub fn beta_orbit(&self, gamma: usize) -> Vec<usize> {
        let mut orbit: Vec<usize> = (0..self.g_order()).map(|g| self.beta(g, gamma)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        orbit
    }

    /// All β-orbits, in order of their smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.gamma_order()];
        let mut out = Vec::new();
        for c in 0..self.gamma_order() {
            if !seen[c] {
                let orbit = self.beta_orbit(c);
                for &x in &orbit {
                    seen[x] = true;
                }
                out.push(orbit);
            }
        }
        out
    }

    fn check_orbit(&self, orbit: &[usize]) -> Result<(), BicrossedError> {
        match orbit.first() {
            Some(&c) if c < self.gamma_order() && self.beta_orbit(c) == orbit => Ok(()),
            _ => Err(BicrossedError::NotAnOrbit),
        }
    }

    /// `A_{r,s} = {g ∈ G : β_g(r) = s}` for `r, s` in a β-orbit.
    pub fn magic_unitary(&self, orbit: &[usize]) -> Result<MagicUnitary, BicrossedError> {
        self.check_orbit(orbit)?;
        let entries = orbit
            .iter()
            .map(|&r| {
                orbit
                    .iter()
                    .map(|&s| (0..self.g_order()).map(|g| self.beta(g, r) == s).collect())
                    .collect()
            })
            .collect();
        Ok(MagicUnitary {
            orbit: orbit.to_vec(),
            entries,
        })
    }

    /// `π(u_γ)δ_h = δ_{α_γ(h)}` on `ℓ²(G)`.
    pub fn pi_u(&self, gamma: usize) -> ComplexMatrix {
        permutation_matrix(&self.alpha[gamma])
    }

    /// `π(ω(f))` = multiplication by `f` on `ℓ²(G)`.
    pub fn pi_omega(&self, f: &[C64]) -> ComplexMatrix {
        assert_eq!(f.len(), self.g_order());
        ComplexMatrix::diagonal(f)
    }

    /// Largest deviation of `π(u_γ)π(ω(δ_h))π(u_γ)* = π(ω(δ_h∘α_{γ⁻¹}))`
    /// over all `γ` and `h`.
    pub fn covariance_defect(&self) -> f64 {
        let ng = self.g_order();
        let mut worst = 0.0f64;
        for c in 0..self.gamma_order() {
            let u = self.pi_u(c);
            let c_inv = self.gamma_index(self.ambient.inv(self.gamma_part[c]));
            for h in 0..ng {
                let delta = |x: usize| C64::new(if x == h { 1.0 } else { 0.0 }, 0.0);
                let f: Vec<C64> = (0..ng).map(delta).collect();
                let moved: Vec<C64> = (0..ng).map(|g| delta(self.alpha(c_inv, g))).collect();
                let lhs = &(&u * &self.pi_omega(&f)) * &u.adjoint();
                worst = worst.max(lhs.max_abs_diff(&self.pi_omega(&moved)));
            }
        }
        worst
    }

    /// `V = Σ_{r,s} e_rs ⊗ π(u_r)π(ω(1_{A_rs}))` on `C^{|orbit|} ⊗ ℓ²(G)`.
    pub fn rep_v(&self, orbit: &[usize]) -> Result<ComplexMatrix, BicrossedError> {
        let magic = self.magic_unitary(orbit)?;
        let (m, n) = (orbit.len(), self.g_order());
        let mut v = ComplexMatrix::zeros(m * n, m * n);
        for (ri, &r) in orbit.iter().enumerate() {
            let u = self.pi_u(r);
            for si in 0..m {
                let block = &u * &magic.projection(ri, si);
                for i in 0..n {
                    for j in 0..n {
                        v[(ri * n + i, si * n + j)] = block[(i, j)];
                    }
                }
            }
        }
        Ok(v)
    }

    /// `Φ(ρ) = (φ⊗id)(V(I⊗ρ)V*)` for a density matrix `φ` on `C^{|orbit|}`.
    pub fn channel(&self, orbit: &[usize], state: &ComplexMatrix) -> Result<Channel, BicrossedError> {
        if state.rows() != orbit.len() || !state.is_square() {
            return Err(ChannelError::NotAState(format!(
                "state is {}×{}, orbit has {} elements",
                state.rows(),
                state.cols(),
                orbit.len()
            ))
            .into());
        }
        let v = self.rep_v(orbit)?;
        Ok(block_channel(
            &[RepBlock {
                unitary: v,
                state: state.clone(),
            }],
            false,
        )?)
    }

    /// The channel for the normalized trace on `C^{|orbit|}`, with Kraus
    /// operators `|orbit|^{-1/2}·π(u_r)π(ω(1_{A_rs}))`.
    pub fn tracial_channel(&self, orbit: &[usize]) -> Result<Channel, BicrossedError> {
        let magic = self.magic_unitary(orbit)?;
        let scale = 1.0 / (orbit.len() as f64).sqrt();
        let mut kraus = Vec::new();
        for (ri, &r) in orbit.iter().enumerate() {
            let u = self.pi_u(r);
            for si in 0..orbit.len() {
                kraus.push((&u * &magic.projection(ri, si)).scale_real(scale));
            }
        }
        Ok(Channel::new(kraus)?)
    }

    /// The tracial channel written as a mixture of unitary conjugations:
    /// each row of the magic unitary is a PVM `{p_s}` whose pinching equals
    /// the average over `U_r^k`, `U_r = Σ_s e^{2πis/n} p_s`, so
    /// `Φ = (mn)⁻¹ Σ_{r,k} Ad(π(u_r)U_r^k)`.
    pub fn mixed_unitary_reconstruction(&self, orbit: &[usize]) -> Result<Channel, BicrossedError> {
        let magic = self.magic_unitary(orbit)?;
        let m = orbit.len();
        let mut unitaries = Vec::new();
        for (ri, &r) in orbit.iter().enumerate() {
            let pvm: Vec<ComplexMatrix> = (0..m).map(|si| magic.projection(ri, si)).collect();
            let phase = pvm_phase_unitary(&pvm)?;
            let u = self.pi_u(r);
            let mut power = ComplexMatrix::identity(self.g_order());
            for _ in 0..m {
                power = &power * &phase.unitary;
                unitaries.push(&u * &power);
            }
        }
        let weights = vec![1.0 / (m * m) as f64; unitaries.len()];
        Ok(Channel::mixed_unitary(&unitaries, &weights)?)
    }

    /// `ρ ↦ |orbit|⁻¹ Σ_r π(u_r)ρπ(u_r)*`.
    pub fn conjugation_channel(&self, orbit: &[usize]) -> Result<Channel, BicrossedError> {
        self.check_orbit(orbit)?;
        let unitaries: Vec<ComplexMatrix> = orbit.iter().map(|&r| self.pi_u(r)).collect();
        let weights = vec![1.0 / orbit.len() as f64; orbit.len()];
        Ok(Channel::mixed_unitary(&unitaries, &weights)?)
    }

    /// Numbers describing the channel on one orbit for the given state.
    pub fn report(&self, orbit: &[usize], state: &ComplexMatrix) -> Result<BicrossedReport, BicrossedError> {
        let magic = self.magic_unitary(orbit)?;
        let v = self.rep_v(orbit)?;
        let id = ComplexMatrix::identity(v.rows());
        let v_defect = (&v.adjoint() * &v).max_abs_diff(&id);
        let channel = self.channel(orbit, state)?;
        let m = orbit.len() as f64;
        let tracial = state.max_abs_diff(&ComplexMatrix::identity(orbit.len()).scale_real(1.0 / m)) < 1e-12;
        let mixed_unitary_deviation = if tracial {
            let mu = self.mixed_unitary_reconstruction(orbit)?;
            Some(channel.choi().max_abs_diff(&mu.choi()))
        } else {
            None
        };
        Ok(BicrossedReport {
            gamma_order: self.gamma_order(),
            g_order: self.g_order(),
            orbits: self.orbits(),
            orbit: orbit.to_vec(),
            magic: magic.is_magic(),
            v_unitarity_defect: v_defect,
            tp_deviation: channel.tp_deviation(),
            unital_deviation: channel.unital_deviation(),
            kraus_rank: channel.degree(),
            commutant_dimension: channel.kraus_commutant().len(),
            mixed_unitary_deviation,
            second_singular_value: channel.second_singular_value(),
        })
    }
}

/// `U = Σ_{k=1}^n e^{2πik/n} p_k` for a PVM `p_1..p_n`, with the pinching
/// identity checked on every matrix unit.
pub fn pvm_phase_unitary(pvm: &[ComplexMatrix]) -> Result<PhaseUnitary, BicrossedError> {
    let Some(first) = pvm.first() else {
        return Err(BicrossedError::NotAPVM("empty".into()));
    };
    let dim = first.rows();
    if pvm.iter().any(|p| p.rows() != dim || p.cols() != dim) {
        return Err(BicrossedError::NotAPVM("sizes differ".into()));
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for (i, p) in pvm.iter().enumerate() {
        if (p * p).max_abs_diff(p) > TOL_PVM || p.hermitian_deviation() > TOL_PVM {
            return Err(BicrossedError::NotAPVM(format!("element {i} is not a projection")));
        }
        for (j, q) in pvm.iter().enumerate().skip(i + 1) {
            if (p * q).max_abs() > TOL_PVM {
                return Err(BicrossedError::NotAPVM(format!("elements {i} and {j} overlap")));
            }
        }
        sum = &sum + p;
    }
    if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > TOL_PVM {
        return Err(BicrossedError::NotAPVM("does not sum to the identity".into()));
    }

    let n = pvm.len();
    let mut unitary = ComplexMatrix::zeros(dim, dim);
    for (k, p) in pvm.iter().enumerate() {
        let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k + 1) as f64 / n as f64);
        unitary = &unitary + &p.scale(phase);
    }
    let mut powers = Vec::with_capacity(n);
    let mut acc = ComplexMatrix::identity(dim);
    for _ in 0..n {
        acc = &acc * &unitary;
        powers.push(acc.clone());
    }
    let mut deviation = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let mut rho = ComplexMatrix::zeros(dim, dim);
            rho[(i, j)] = C64::new(1.0, 0.0);
            let mut lhs = ComplexMatrix::zeros(dim, dim);
            for u in &powers {
                lhs = &lhs + &(&(u * &rho) * &u.adjoint());
            }
            let lhs = lhs.scale_real(1.0 / n as f64);
            let mut rhs = ComplexMatrix::zeros(dim, dim);
            for p in pvm {
                rhs = &rhs + &(&(p * &rho) * p);
            }
            deviation = deviation.max(lhs.max_abs_diff(&rhs));
        }
    }
    Ok(PhaseUnitary { unitary, deviation })
}
