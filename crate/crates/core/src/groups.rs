//! Finite groups given by permutation generators or multiplication tables,
//! their irreducible unitary representations, and Kazhdan-type certificates.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::numerics::{hermitian_eig, ComplexMatrix, C64, TOL_HERM};

/// Largest group the permutation closure will enumerate.
pub const MAX_ORDER: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("closure exceeds {limit} elements")]
    ClosureTooLarge { limit: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("subset is not a subgroup")]
    NotASubgroup,
    #[error("element set is not closed under inverses")]
    NotSymmetric,
    #[error("element set contains the identity")]
    ContainsIdentity,
    #[error("element set does not generate the group (an irrep has an invariant vector)")]
    NotGenerating,
    #[error("group has no nontrivial irreducible representation")]
    TrivialGroup,
    #[error("failed to split the regular representation after {attempts} seeds")]
    SplitFailed { attempts: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// A finite group stored as a full multiplication table. Element 0 is the
/// identity.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<usize>,
    /// Images of the points under each element when built from permutations.
    permutations: Option<Vec<Vec<usize>>>,
}

/// Composition `(p·q)(i) = p(q(i))`: `q` acts first.
pub fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

impl FiniteGroup {
    /// Closure of the generators under composition, with elements numbered
    /// in breadth-first discovery order from the identity.
    pub fn from_permutation_generators(perms: &[Vec<usize>]) -> Result<Self, GroupError> {
        let degree = perms.first().map_or(1, Vec::len).max(1);
        for p in perms {
            if p.len() != degree {
                return Err(GroupError::InvalidPermutation(
                    "generators act on different point sets".into(),
                ));
            }
            let mut seen = vec![false; degree];
            for &x in p {
                if x >= degree || seen[x] {
                    return Err(GroupError::InvalidPermutation(format!("{p:?} is not a bijection")));
                }
                seen[x] = true;
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut elements = vec![identity.clone()];
        index.insert(identity, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for s in perms {
                let y = compose(&elements[x], s);
                if !index.contains_key(&y) {
                    if elements.len() == MAX_ORDER {
                        return Err(GroupError::ClosureTooLarge { limit: MAX_ORDER });
                    }
                    index.insert(y.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(y);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        let mut inverse = vec![0; n];
        for a in 0..n {
            for b in 0..n {
                let ab = index[&compose(&elements[a], &elements[b])];
                table[a * n + b] = ab as u32;
                if ab == 0 {
                    inverse[a] = b;
                }
            }
        }
        Ok(Self {
            order: n,
            table,
            inverse,
            permutations: Some(elements),
        })
    }

    /// Group from an explicit table, `rows[a][b] = a·b`, with 0 the identity.
    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        let mut table = vec![0u32; n * n];
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidTable(format!("row {a} has {} entries", row.len())));
            }
            let mut seen = vec![false; n];
            for (b, &ab) in row.iter().enumerate() {
                if ab >= n || seen[ab] {
                    return Err(GroupError::InvalidTable(format!("row {a} is not a permutation")));
                }
                seen[ab] = true;
                table[a * n + b] = ab as u32;
            }
        }
        for a in 0..n {
            if table[a] as usize != a || table[a * n] as usize != a {
                return Err(GroupError::InvalidTable("element 0 is not the identity".into()));
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] == 0 {
                    inverse[a] = b;
                }
            }
            if table[inverse[a] * n + a] != 0 {
                return Err(GroupError::InvalidTable(format!("element {a} has no two-sided inverse")));
            }
        }
        let group = Self {
            order: n,
            table,
            inverse,
            permutations: None,
        };
        if !group.is_associative() {
            return Err(GroupError::InvalidTable("multiplication is not associative".into()));
        }
        Ok(group)
    }

    /// Cyclic group `Z_n` with `a·b = a + b mod n`.
    pub fn cyclic(n: usize) -> Self {
        let rows: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(&rows).expect("cyclic table is a group")
    }

    /// Symmetric group on `k` points, generated by a `k`-cycle and a transposition.
    pub fn symmetric(k: usize) -> Self {
        let cycle: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
        let mut swap: Vec<usize> = (0..k).collect();
        if k >= 2 {
            swap.swap(0, 1);
        }
        Self::from_permutation_generators(&[cycle, swap]).expect("symmetric group closure")
    }

    /// Parses a group file: cycle-notation generators, one per line, or a
    /// comma-separated multiplication table. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let lines: Vec<&str> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect();
        if lines.is_empty() {
            return Err(GroupError::Parse("empty group file".into()));
        }
        if lines.iter().any(|l| l.contains('(')) {
            let cycles: Vec<Vec<Vec<usize>>> =
                lines.iter().map(|l| parse_cycles(l)).collect::<Result<_, _>>()?;
            let degree = cycles
                .iter()
                .flatten()
                .flatten()
                .copied()
                .max()
                .map_or(1, |m| m + 1);
            let perms: Vec<Vec<usize>> = cycles.iter().map(|c| cycles_to_perm(c, degree)).collect::<Result<_, _>>()?;
            Self::from_permutation_generators(&perms)
        } else {
            let rows: Vec<Vec<usize>> = lines
                .iter()
                .map(|l| {
                    l.split(',')
                        .map(|t| t.trim().parse::<usize>().map_err(|e| GroupError::Parse(e.to_string())))
                        .collect()
                })
                .collect::<Result<_, _>>()?;
            Self::from_table(&rows)
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Exhaustive for order ≤ 64, otherwise 10⁴ seeded random triples.
    pub fn is_associative(&self) -> bool {
        let n = self.order;
        let check = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 64 {
            (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| check(a, b, c))))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (0..10_000).all(|_| check(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)))
        }
    }

    pub fn permutation(&self, g: usize) -> Option<&[usize]> {
        self.permutations.as_ref().map(|p| p[g].as_slice())
    }

    pub fn find_permutation(&self, perm: &[usize]) -> Option<usize> {
        self.permutations.as_ref()?.iter().position(|p| p == perm)
    }

    /// Cycle notation (1-based points) for permutation groups, the index otherwise.
    pub fn label(&self, g: usize) -> String {
        match self.permutation(g) {
            Some(p) => perm_to_cycles(p),
            None => g.to_string(),
        }
    }

    /// Elements acting as a single transposition.
    pub fn transpositions(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&g| {
                self.permutation(g)
                    .is_some_and(|p| p.iter().enumerate().filter(|(i, &x)| *i != x).count() == 2)
            })
            .collect()
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// `S = S⁻¹`.
    pub fn is_symmetric(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        s.iter().all(|&g| s.contains(&self.inv(g)))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut out = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_subgroup(&self, subset: &[usize]) -> bool {
        let mut member = vec![false; self.order];
        for &h in subset {
            if h >= self.order {
                return false;
            }
            member[h] = true;
        }
        member[0]
            && subset.iter().all(|&a| member[self.inv(a)] && subset.iter().all(|&b| member[self.mul(a, b)]))
    }

    /// Every subgroup, as sorted element lists ordered by size then content.
    ///
    /// Each subgroup is a join of cyclic subgroups, so repeatedly joining
    /// known subgroups with single elements reaches all of them.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier: Vec<Vec<usize>> = vec![vec![0]];
        found.insert(vec![0]);
        while let Some(h) = frontier.pop() {
            let mut member = vec![false; self.order];
            for &x in &h {
                member[x] = true;
            }
            for g in (0..self.order).filter(|&g| !member[g]) {
                let mut gens = h.clone();
                gens.push(g);
                let k = self.generated_subgroup(&gens);
                if found.insert(k.clone()) {
                    frontier.push(k);
                }
            }
        }
        let mut all: Vec<Vec<usize>> = found.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    /// The subgroup as a group in its own right, plus the embedding
    /// (local index → ambient index). The identity stays at local index 0.
    pub fn subgroup_as_group(&self, subset: &[usize]) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        if !self.is_subgroup(subset) {
            return Err(GroupError::NotASubgroup);
        }
        let mut embed: Vec<usize> = subset.to_vec();
        embed.sort_unstable();
        embed.dedup();
        let local: HashMap<usize, usize> = embed.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let rows: Vec<Vec<usize>> = embed
            .iter()
            .map(|&a| embed.iter().map(|&b| local[&self.mul(a, b)]).collect())
            .collect();
        let mut sub = Self::from_table(&rows)?;
        if let Some(perms) = &self.permutations {
            sub.permutations = Some(embed.iter().map(|&g| perms[g].clone()).collect());
        }
        Ok((sub, embed))
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut class_of = vec![usize::MAX; self.order];
        let mut classes = Vec::new();
        for g in 0..self.order {
            if class_of[g] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> =
                (0..self.order).map(|x| self.mul(self.mul(x, g), self.inv(x))).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = classes.len();
            }
            classes.push(members);
        }
        classes
    }
}

fn parse_cycles(line: &str) -> Result<Vec<Vec<usize>>, GroupError> {
    let mut cycles = Vec::new();
    let mut rest = line;
    while let Some(open) = rest.find('(') {
        let close = rest[open..]
            .find(')')
            .ok_or_else(|| GroupError::Parse(format!("unbalanced parenthesis in '{line}'")))?
            + open;
        let body = rest[open + 1..close].trim();
        let tokens: Vec<&str> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        let points: Vec<&str> = if tokens.len() == 1 && tokens[0].len() > 1 {
            // compact form like (123): one digit per point
            tokens[0].split("").filter(|t| !t.is_empty()).collect()
        } else {
            tokens
        };
        let cycle = points
            .iter()
            .map(|t| match t.parse::<usize>() {
                Ok(0) => Err(GroupError::Parse("points are numbered from 1".into())),
                Ok(p) => Ok(p - 1),
                Err(e) => Err(GroupError::Parse(format!("bad point '{t}': {e}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        cycles.push(cycle);
        rest = &rest[close + 1..];
    }
    Ok(cycles)
}

fn cycles_to_perm(cycles: &[Vec<usize>], degree: usize) -> Result<Vec<usize>, GroupError> {
    let mut perm: Vec<usize> = (0..degree).collect();
    // Cycles compose right to left, matching `compose`.
    for cycle in cycles.iter().rev() {
        let mut step: Vec<usize> = (0..degree).collect();
        let mut seen = BTreeSet::new();
        for (k, &p) in cycle.iter().enumerate() {
            if !seen.insert(p) {
                return Err(GroupError::InvalidPermutation(format!("point {} repeats in a cycle", p + 1)));
            }
            step[p] = cycle[(k + 1) % cycle.len()];
        }
        perm = compose(&step, &perm);
    }
    Ok(perm)
}

/// Cycle notation with 1-based points; the identity is `()`.
pub fn perm_to_cycles(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut x = p[start];
        while x != start {
            seen[x] = true;
            cycle.push(x + 1);
            x = p[x];
        }
        let body: Vec<String> = cycle.iter().map(ToString::to_string).collect();
        out.push('(');
        out.push_str(&body.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Parses one line of cycle notation into a permutation of `degree` points.
pub fn parse_permutation(line: &str, degree: usize) -> Result<Vec<usize>, GroupError> {
    let cycles = parse_cycles(line)?;
    if cycles.iter().flatten().any(|&p| p >= degree) {
        return Err(GroupError::InvalidPermutation(format!("'{line}' moves a point beyond {degree}")));
    }
    cycles_to_perm(&cycles, degree)
}

/// Left cosets `gH`, each sorted, listed in order of their smallest element.
pub fn cosets(group: &FiniteGroup, subgroup: &[usize]) -> Result<Vec<Vec<usize>>, GroupError> {
    if !group.is_subgroup(subgroup) {
        return Err(GroupError::NotASubgroup);
    }
    let mut assigned = vec![false; group.order()];
    let mut out = Vec::new();
    for g in 0..group.order() {
        if assigned[g] {
            continue;
        }
        let mut coset: Vec<usize> = subgroup.iter().map(|&h| group.mul(g, h)).collect();
        coset.sort_unstable();
        coset.dedup();
        for &x in &coset {
            assigned[x] = true;
        }
        out.push(coset);
    }
    Ok(out)
}

/// Left regular representation, `λ(g)δ_h = δ_{gh}`.
pub fn regular_representation(group: &FiniteGroup) -> Vec<ComplexMatrix> {
    let n = group.order();
    (0..n)
        .map(|g| {
            let mut m = ComplexMatrix::zeros(n, n);
            for h in 0..n {
                m[(group.mul(g, h), h)] = C64::new(1.0, 0.0);
            }
            m
        })
        .collect()
}

/// A unitary representation, one matrix per group element in group order.
#[derive(Clone, Debug)]
pub struct Irrep {
    matrices: Vec<ComplexMatrix>,
}

impl Irrep {
    /// Panics if `matrices` is empty or the matrices are not all square of one size.
    pub fn from_matrices(matrices: Vec<ComplexMatrix>) -> Self {
        let d = matrices[0].rows();
        assert!(matrices.iter().all(|m| m.rows() == d && m.cols() == d));
        Self { matrices }
    }

    pub fn dimension(&self) -> usize {
        self.matrices[0].rows()
    }

    pub fn matrix(&self, g: usize) -> &ComplexMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(ComplexMatrix::trace).collect()
    }

    pub fn is_trivial(&self, tol: f64) -> bool {
        self.dimension() == 1 && self.matrices.iter().all(|m| (m[(0, 0)] - 1.0).norm() <= tol)
    }

    /// The complex-conjugate representation.
    pub fn conjugate(&self) -> Self {
        Self {
            matrices: self.matrices.iter().map(ComplexMatrix::conj).collect(),
        }
    }

    /// Largest deviation from `π(g)π(h) = π(gh)`, `π(e) = I` and unitarity.
    pub fn homomorphism_defect(&self, group: &FiniteGroup) -> f64 {
        let d = self.dimension();
        let id = ComplexMatrix::identity(d);
        let mut defect = self.matrices[0].max_abs_diff(&id);
        for (g, m) in self.matrices.iter().enumerate() {
            defect = defect.max((&m.adjoint() * m).max_abs_diff(&id));
            for h in 0..group.order() {
                let prod = m * &self.matrices[h];
                defect = defect.max(prod.max_abs_diff(&self.matrices[group.mul(g, h)]));
            }
        }
        defect
    }
}

/// `(1/|G|) Σ_g conj(a_g) b_g`.
pub fn character_inner(a: &[C64], b: &[C64]) -> C64 {
    let s: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    s / a.len() as f64
}

/// All irreducible unitary representations, trivial first, then by dimension.
///
/// A random Hermitian element of the commutant of the left regular
/// representation is diagonalised; each eigenspace carries one copy of an
/// irrep. Copies are identified by character and kept once.
pub fn irreps(group: &FiniteGroup, seed: u64, tol: f64) -> Result<Vec<Irrep>, GroupError> {
    const ATTEMPTS: usize = 8;
    for attempt in 0..ATTEMPTS {
        if let Some(found) = try_split(group, seed.wrapping_add(attempt as u64), tol) {
            return Ok(found);
        }
    }
    Err(GroupError::SplitFailed { attempts: ATTEMPTS })
}

fn try_split(group: &FiniteGroup, seed: u64, tol: f64) -> Option<Vec<Irrep>> {
    let n = group.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeff: Vec<C64> = (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    // X = Σ c'_g ρ(g) with ρ the right regular action; X[k][h] = c'(k⁻¹h).
    let sym: Vec<C64> = (0..n).map(|g| coeff[g] + coeff[group.inv(g)].conj()).collect();
    let x = ComplexMatrix::from_fn(n, n, |k, h| sym[group.mul(group.inv(k), h)]);
    let eig = hermitian_eig(&x, TOL_HERM).ok()?;

    let spread = (eig.values[n - 1] - eig.values[0]).max(1.0);
    let cluster_tol = 1e-7 * spread;
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || eig.values[k] - eig.values[k - 1] > cluster_tol {
            clusters.push((start, k));
            start = k;
        }
    }

    let mut found: Vec<(Vec<C64>, Irrep)> = Vec::new();
    let mut covered = 0;
    for (lo, hi) in clusters {
        let d = hi - lo;
        // χ(g) = Σ_i Σ_h conj(W[gh][i]) W[h][i]
        let chi: Vec<C64> = (0..n)
            .map(|g| {
                let mut s = C64::new(0.0, 0.0);
                for i in lo..hi {
                    for h in 0..n {
                        s += eig.vectors[(group.mul(g, h), i)].conj() * eig.vectors[(h, i)];
                    }
                }
                s
            })
            .collect();
        let norm = character_inner(&chi, &chi).re;
        if (norm - 1.0).abs() > 1e-6 || (chi[0].re - d as f64).abs() > 1e-6 {
            return None;
        }
        if found.iter().any(|(c, _)| max_diff(c, &chi) < 1e-6) {
            continue;
        }
        let matrices: Vec<ComplexMatrix> = (0..n)
            .map(|g| {
                ComplexMatrix::from_fn(d, d, |i, j| {
                    let mut s = C64::new(0.0, 0.0);
                    for h in 0..n {
                        s += eig.vectors[(group.mul(g, h), lo + i)].conj() * eig.vectors[(h, lo + j)];
                    }
                    s
                })
            })
            .collect();
        covered += d * d;
        found.push((chi, Irrep { matrices }));
    }
    if covered != n {
        return None;
    }
    for (_, irrep) in &found {
        let defect = if n <= 200 {
            irrep.homomorphism_defect(group)
        } else {
            sampled_defect(irrep, group)
        };
        if defect > tol.max(1e-8) {
            return None;
        }
    }
    found.sort_by(|(a, ra), (b, rb)| {
        let ta = ra.is_trivial(1e-6);
        let tb = rb.is_trivial(1e-6);
        tb.cmp(&ta)
            .then(ra.dimension().cmp(&rb.dimension()))
            .then_with(|| character_order(a, b))
    });
    Some(found.into_iter().map(|(_, r)| r).collect())
}

fn sampled_defect(irrep: &Irrep, group: &FiniteGroup) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = group.order();
    let id = ComplexMatrix::identity(irrep.dimension());
    let mut defect = irrep.matrix(0).max_abs_diff(&id);
    for _ in 0..2000 {
        let g = rng.random_range(0..n);
        let h = rng.random_range(0..n);
        let prod = irrep.matrix(g) * irrep.matrix(h);
        defect = defect.max(prod.max_abs_diff(irrep.matrix(group.mul(g, h))));
        defect = defect.max((&irrep.matrix(g).adjoint() * irrep.matrix(g)).max_abs_diff(&id));
    }
    defect
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Orders characters by descending real parts then imaginary parts, on a
/// 1e-6 grid so that round-off cannot flip the order.
fn character_order(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    let key = |z: &C64| ((-z.re * 1e6).round() as i64, (-z.im * 1e6).round() as i64);
    a.iter().map(key).cmp(b.iter().map(key))
}

/// `ε = min_π √(2(1 − λ_max(Re M_π)))` over nontrivial irreps, with
/// `M_π = |S|⁻¹ Σ_s π(s)`.
///
/// For a unit vector ξ, `max_s ‖π(s)ξ − ξ‖² ≥ mean_s ‖π(s)ξ − ξ‖² =
/// 2(1 − ⟨ξ, Re M_π ξ⟩)`, so `(S, ε)` is a Kazhdan pair.
pub fn kazhdan_lower_bound(group: &FiniteGroup, set: &[usize], irreps: &[Irrep]) -> Result<f64, GroupError> {
    if !group.is_symmetric(set) {
        return Err(GroupError::NotSymmetric);
    }
    let mut best = f64::INFINITY;
    for irrep in irreps.iter().filter(|r| !r.is_trivial(1e-8)) {
        let top = top_mean_eigenvalue(irrep, set);
        if top >= 1.0 - 1e-9 {
            return Err(GroupError::NotGenerating);
        }
        best = best.min((2.0 * (1.0 - top)).max(0.0).sqrt());
    }
    if best.is_infinite() {
        return Err(GroupError::TrivialGroup);
    }
    Ok(best)
}

/// Largest eigenvalue of `Re(|S|⁻¹ Σ_s π(s))`.
pub fn top_mean_eigenvalue(irrep: &Irrep, set: &[usize]) -> f64 {
    let d = irrep.dimension();
    let mut m = ComplexMatrix::zeros(d, d);
    for &s in set {
        m = &m + irrep.matrix(s);
    }
    let m = m.scale_real(1.0 / set.len() as f64).hermitian_part();
    let eig = hermitian_eig(&m, f64::INFINITY).expect("Hermitian part");
    eig.values[d - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        FiniteGroup::parse("(1 2)\n(1 2 3)\n").unwrap()
    }

    #[test]
    fn z2_from_single_transposition() {
        let g = FiniteGroup::from_permutation_generators(&[vec![1, 0]]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.mul(1, 1), 0);
    }

    #[test]
    fn s3_and_s4_orders() {
        assert_eq!(s3().order(), 6);
        let s4 = FiniteGroup::parse("(1234)\n(1,2)").unwrap();
        assert_eq!(s4.order(), 24);
        assert_eq!(s4.transpositions().len(), 6);
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = parse_permutation("(1 3)(2 4 5)", 5).unwrap();
        assert_eq!(p, vec![2, 3, 0, 4, 1]);
        assert_eq!(perm_to_cycles(&p), "(1 3)(2 4 5)");
        assert_eq!(perm_to_cycles(&[0, 1]), "()");
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table(&[vec![0, 1], vec![1, 0]]).is_ok());
        assert!(FiniteGroup::from_table(&[vec![1, 0], vec![0, 1]]).is_err());
        let z3 = FiniteGroup::parse("0,1,2\n1,2,0\n2,0,1\n").unwrap();
        assert_eq!(z3.inv(1), 2);
    }

    #[test]
    fn regular_representation_is_homomorphism() {
        let g = s3();
        let lambda = regular_representation(&g);
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(&lambda[a] * &lambda[b], lambda[g.mul(a, b)]);
            }
        }
    }

    #[test]
    fn cosets_partition() {
        let g = s3();
        assert_eq!(cosets(&g, &(0..6).collect::<Vec<_>>()).unwrap().len(), 1);
        assert_eq!(cosets(&g, &[0]).unwrap().len(), 6);
        let three_cycle = (0..6).find(|&x| g.element_order(x) == 3).unwrap();
        let a3 = g.generated_subgroup(&[three_cycle]);
        assert_eq!(cosets(&g, &a3).unwrap().len(), 2);
        assert_eq!(cosets(&g, &[0, three_cycle]), Err(GroupError::NotASubgroup));
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(s3().subgroups().len(), 6);
        assert_eq!(FiniteGroup::symmetric(4).subgroups().len(), 30);
    }

    #[test]
    fn irreps_of_small_groups() {
        let dims = |g: &FiniteGroup| -> Vec<usize> {
            irreps(g, 42, 1e-8).unwrap().iter().map(Irrep::dimension).collect()
        };
        assert_eq!(dims(&FiniteGroup::cyclic(4)), vec![1, 1, 1, 1]);
        assert_eq!(dims(&s3()), vec![1, 1, 2]);
        assert_eq!(dims(&FiniteGroup::symmetric(4)), vec![1, 1, 2, 3, 3]);
    }

    #[test]
    fn cyclic_characters_are_roots_of_unity() {
        let z4 = FiniteGroup::cyclic(4);
        let reps = irreps(&z4, 1, 1e-8).unwrap();
        assert!(reps[0].is_trivial(1e-10));
        for r in &reps {
            let chi = r.character();
            let generator = chi[1];
            assert!((generator.powu(4) - 1.0).norm() < 1e-9);
            for (k, value) in chi.iter().enumerate() {
                assert!((value - generator.powu(k as u32)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn kazhdan_z2() {
        let z2 = FiniteGroup::cyclic(2);
        let reps = irreps(&z2, 0, 1e-8).unwrap();
        assert!((kazhdan_lower_bound(&z2, &[1], &reps).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kazhdan_rejects_non_generating_sets() {
        let z4 = FiniteGroup::cyclic(4);
        let reps = irreps(&z4, 0, 1e-8).unwrap();
        assert_eq!(kazhdan_lower_bound(&z4, &[2], &reps), Err(GroupError::NotGenerating));
        assert_eq!(kazhdan_lower_bound(&z4, &[1], &reps), Err(GroupError::NotSymmetric));
    }
}
