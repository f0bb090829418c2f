//! Finite simple graphs: Cheeger constants, spectra, Cayley and Schreier
//! graphs, and decompositions of regular graphs into permutations.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::groups::{cosets, FiniteGroup, GroupError};
use crate::numerics::{hermitian_eig, ComplexMatrix, TOL_HERM};

/// Largest vertex count for exhaustive cut enumeration.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 24;

const CHEEGER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph has {vertices} vertices; exhaustive search is capped at {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph needs at least {0} vertices")]
    TooSmall(usize),
    #[error("generating set is not symmetric")]
    NotSymmetric,
    #[error("generating set contains the identity")]
    ContainsIdentity,
    #[error("cycle cover decomposition failed at stage: {stage}")]
    DecompositionFailed { stage: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Simple undirected loop-free graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut neighbors = vec![Vec::new(); vertex_count];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u == v || u >= vertex_count || v >= vertex_count {
                return Err(GraphError::InvalidEdge(u, v));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self { neighbors })
    }

    /// Edge-list text: a header line `n m`, then `m` lines `u v` (0-based).
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let parse_pair = |line: &str| -> Result<(usize, usize), GraphError> {
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| GraphError::Parse(format!("bad integer '{t}'"))))
                .collect::<Result<_, _>>()?;
            match nums.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(GraphError::Parse(format!("expected two integers, got '{line}'"))),
            }
        };
        let (n, m) = parse_pair(lines.next().ok_or_else(|| GraphError::Parse("empty input".into()))?)?;
        let edges: Vec<(usize, usize)> = lines.map(parse_pair).collect::<Result<_, _>>()?;
        if edges.len() != m {
            return Err(GraphError::Parse(format!("header declares {m} edges, found {}", edges.len())));
        }
        Self::new(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let edges = self.edges();
        let mut out = format!("{} {}\n", self.vertex_count(), edges.len());
        for (u, v) in edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle needs n ≥ 3")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::new(n, &edges).expect("complete graph")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::new(10, &edges).expect("Petersen graph")
    }

    /// The `k`-dimensional hypercube.
    pub fn hypercube(k: u32) -> Self {
        let n = 1usize << k;
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|v| (0..k).map(move |b| (v, v ^ (1 << b))))
            .filter(|(u, v)| u < v)
            .collect();
        Self::new(n, &edges).expect("hypercube")
    }

    /// Uniform-ish random `d`-regular graph by the pairing model with rejection.
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Self, GraphError> {
        if d >= n || (n * d) % 2 == 1 {
            return Err(GraphError::NotRegular);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
            stubs.shuffle(&mut rng);
            let edges: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
            if let Ok(g) = Self::new(n, &edges) {
                return Ok(g);
            }
        }
        Err(GraphError::NotRegular)
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Sorted edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.neighbors.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.neighbors.first().map_or(0, Vec::len);
        self.neighbors.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn adjacency_matrix(&self) -> ComplexMatrix {
        let n = self.vertex_count();
        let mut a = ComplexMatrix::zeros(n, n);
        for (u, v) in self.edges() {
            a[(u, v)] = 1.0.into();
            a[(v, u)] = 1.0.into();
        }
        a
    }

    pub fn adjacency_counts(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0; n]; n];
        for (u, v) in self.edges() {
            a[u][v] = 1;
            a[v][u] = 1;
        }
        a
    }
}

/// Exact Cheeger constant `min |E(U, V∖U)| / min(|U|, |V∖U|)`.
///
/// Subsets avoiding the last vertex are walked in Gray-code order, so each
/// step toggles one vertex and updates the cut size from a neighbour mask.
pub fn expansion_constant(graph: &Graph) -> Result<f64, GraphError> {
    let n = graph.vertex_count();
    if n < 2 {
        return Err(GraphError::TooSmall(2));
    }
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(GraphError::TooLarge {
            vertices: n,
            cap: MAX_BRUTE_FORCE_VERTICES,
        });
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let (mut best_num, mut best_den) = (u64::MAX, 1u64);
    let mut set = 0u32;
    let mut cut: i64 = 0;
    let mut size = 0usize;
    for k in 1u32..(1u32 << (n - 1)) {
        let v = k.trailing_zeros() as usize;
        let inside = (masks[v] & set).count_ones() as i64;
        let deg = masks[v].count_ones() as i64;
        if set & (1 << v) == 0 {
            cut += deg - 2 * inside;
            size += 1;
        } else {
            cut -= deg - 2 * inside;
            size -= 1;
        }
        set ^= 1 << v;
        let den = size.min(n - size) as u64;
        let num = cut as u64;
        if best_num == u64::MAX || num * best_den < best_num * den {
            best_num = num;
            best_den = den;
        }
    }
    Ok(best_num as f64 / best_den as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralData {
    /// Adjacency eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub lambda2: Option<f64>,
    pub is_connected: bool,
    pub regular_degree: Option<usize>,
}

pub fn spectral_data(graph: &Graph) -> SpectralData {
    let eig = hermitian_eig(&graph.adjacency_matrix(), TOL_HERM).expect("adjacency is symmetric");
    let mut eigenvalues = eig.values;
    eigenvalues.reverse();
    let regular_degree = graph.regular_degree();
    let is_connected = match regular_degree {
        Some(d) if graph.vertex_count() > 0 => {
            eigenvalues.iter().filter(|&&x| (x - d as f64).abs() < 1e-9).count() == 1
        }
        _ => graph.is_connected(),
    };
    SpectralData {
        lambda2: eigenvalues.get(1).copied(),
        eigenvalues,
        is_connected,
        regular_degree,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheegerReport {
    pub degree: usize,
    pub lambda2: f64,
    pub expansion: f64,
    /// `(d − λ₂)/2`
    pub lower: f64,
    /// `√(2d(d − λ₂))`
    pub upper: f64,
    /// `√(d² − λ₂²)`
    pub upper_refined: f64,
    pub holds: bool,
}

pub fn check_cheeger(graph: &Graph) -> Result<CheegerReport, GraphError> {
    let degree = graph.regular_degree().ok_or(GraphError::NotRegular)?;
    let spectrum = spectral_data(graph);
    if !spectrum.is_connected {
        return Err(GraphError::NotConnected);
    }
    let lambda2 = spectrum.lambda2.ok_or(GraphError::TooSmall(2))?;
    let expansion = expansion_constant(graph)?;
    let d = degree as f64;
    let lower = 0.5 * (d - lambda2);
    let upper = (2.0 * d * (d - lambda2)).max(0.0).sqrt();
    let upper_refined = (d * d - lambda2 * lambda2).max(0.0).sqrt();
    let holds = lower <= expansion + CHEEGER_TOL
        && expansion <= upper + CHEEGER_TOL
        && expansion <= upper_refined + CHEEGER_TOL;
    Ok(CheegerReport {
        degree,
        lambda2,
        expansion,
        lower,
        upper,
        upper_refined,
        holds,
    })
}

fn check_generating_set(group: &FiniteGroup, set: &[usize]) -> Result<(), GraphError> {
    if set.contains(&group.identity()) {
        return Err(GraphError::ContainsIdentity);
    }
    if !group.is_symmetric(set) {
        return Err(GraphError::NotSymmetric);
    }
    Ok(())
}

/// Vertices are group elements, edges `{g, gs}` for `s ∈ S`.
pub fn cayley_graph(group: &FiniteGroup, set: &[usize]) -> Result<Graph, GraphError> {
    check_generating_set(group, set)?;
    let mut edges = BTreeSet::new();
    for g in 0..group.order() {
        for &s in set {
            let h = group.mul(g, s);
            edges.insert((g.min(h), g.max(h)));
        }
    }
    Graph::new(group.order(), &edges.into_iter().collect::<Vec<_>>())
}

/// Weighted Schreier coset graph: loops and multiplicities are kept so the
/// operator is exactly `|S|`-regular.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchreierGraph {
    /// Left cosets `gH`, as produced by [`cosets`].
    pub cosets: Vec<Vec<usize>>,
    /// `weights[i][j] = #{s ∈ S : s·C_i = C_j}`.
    pub weights: Vec<Vec<u32>>,
}

impl SchreierGraph {
    pub fn weight_matrix(&self) -> ComplexMatrix {
        let n = self.weights.len();
        ComplexMatrix::from_real_fn(n, n, |i, j| self.weights[i][j] as f64)
    }

    /// The simple graph underlying the coset graph: loops dropped and
    /// parallel edges merged.
    pub fn simple_projection(&self) -> Graph {
        let n = self.weights.len();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.weights[i][j] > 0 || self.weights[j][i] > 0)
            .collect();
        Graph::new(n, &edges).expect("projection is simple")
    }

    /// Eigenvalues of the weight matrix, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let m = self.weight_matrix();
        let eig = hermitian_eig(&m.hermitian_part(), f64::INFINITY).expect("symmetrised");
        let mut v = eig.values;
        v.reverse();
        v
    }

    /// Row CSV of the weight matrix.
    pub fn to_csv(&self) -> String {
        self.weights
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn schreier_graph(group: &FiniteGroup, subgroup: &[usize], set: &[usize]) -> Result<SchreierGraph, GraphError> {
    if !group.is_symmetric(set) {
        return Err(GraphError::NotSymmetric);
    }
    let classes = cosets(group, subgroup)?;
    let mut coset_of = vec![0; group.order()];
    for (i, c) in classes.iter().enumerate() {
        for &g in c {
            coset_of[g] = i;
        }
    }
    let k = classes.len();
    let mut weights = vec![vec![0u32; k]; k];
    for (i, c) in classes.iter().enumerate() {
        let rep = c[0];
        for &s in set {
            weights[i][coset_of[group.mul(s, rep)]] += 1;
        }
    }
    Ok(SchreierGraph { cosets: classes, weights })
}

/// Permutations `P₁..P_d` of the vertices whose permutation matrices sum to
/// the adjacency matrix. `permutations[i][v]` is the image of `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCoverDecomposition {
    pub permutations: Vec<Vec<usize>>,
}

impl CycleCoverDecomposition {
    /// Entrywise sum of the permutation matrices, `M[P(v)][v] += 1`.
    pub fn matrix_sum(&self, n: usize) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0; n]; n];
        for p in &self.permutations {
            for (v, &w) in p.iter().enumerate() {
                m[w][v] += 1;
            }
        }
        m
    }

    pub fn sums_to(&self, graph: &Graph) -> bool {
        self.matrix_sum(graph.vertex_count()) == graph.adjacency_counts()
    }
}

/// Permutation matrix with `P e_v = e_{p(v)}`.
pub fn permutation_matrix(p: &[usize]) -> ComplexMatrix {
    let n = p.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (v, &w) in p.iter().enumerate() {
        m[(w, v)] = 1.0.into();
    }
    m
}

pub fn invert_permutation(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (v, &w) in p.iter().enumerate() {
        inv[w] = v;
    }
    inv
}

const MATCHING_RESEEDS: u64 = 16;
const MATCHING_STEP_BUDGET: usize = 2_000_000;

/// Splits a `d`-regular graph into `⌊d/2⌋` cycle covers traversed both
/// ways, followed by one fixed-point-free involution when `d` is odd.
///
/// For odd `d` a perfect matching is removed first. The remaining
/// even-regular graph is oriented along Euler circuits; every vertex then
/// has equal in- and out-degree, so the out→in bipartite graph is regular
/// and splits into perfect matchings, each a permutation without fixed
/// points or 2-cycles.
pub fn cycle_cover_decomposition(graph: &Graph, seed: u64) -> Result<CycleCoverDecomposition, GraphError> {
    let d = graph.regular_degree().ok_or(GraphError::NotRegular)?;
    let n = graph.vertex_count();
    let mut adjacency: Vec<BTreeSet<usize>> =
        (0..n).map(|v| graph.neighbors(v).iter().copied().collect()).collect();

    let mut matching = None;
    if d % 2 == 1 {
        let m = (0..MATCHING_RESEEDS)
            .find_map(|k| perfect_matching(&adjacency, seed.wrapping_add(k)))
            .ok_or_else(|| GraphError::DecompositionFailed {
                stage: "perfect matching for the odd-degree layer".into(),
            })?;
        for (v, &w) in m.iter().enumerate() {
            adjacency[v].remove(&w);
        }
        matching = Some(m);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out_arcs = euler_orientation(&adjacency, &mut rng);
    let mut remaining = out_arcs;
    let mut permutations = Vec::with_capacity(d);
    for stage in 0..d / 2 {
        let sigma = bipartite_perfect_matching(&remaining, &mut rng).ok_or_else(|| {
            GraphError::DecompositionFailed {
                stage: format!("2-factor {}", stage + 1),
            }
        })?;
        for (v, &w) in sigma.iter().enumerate() {
            remaining[v].retain(|&x| x != w);
        }
        let inverse = invert_permutation(&sigma);
        permutations.push(sigma);
        permutations.push(inverse);
    }
    permutations.extend(matching);
    Ok(CycleCoverDecomposition { permutations })
}

/// Backtracking perfect matching with randomised vertex and edge order.
fn perfect_matching(adjacency: &[BTreeSet<usize>], seed: u64) -> Option<Vec<usize>> {
    let n = adjacency.len();
    if n % 2 == 1 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let options: Vec<Vec<usize>> = adjacency
        .iter()
        .map(|s| {
            let mut v: Vec<usize> = s.iter().copied().collect();
            v.shuffle(&mut rng);
            v
        })
        .collect();
    let mut mate = vec![usize::MAX; n];
    let mut steps = 0;
    fn search(
        order: &[usize],
        options: &[Vec<usize>],
        mate: &mut [usize],
        steps: &mut usize,
    ) -> bool {
        *steps += 1;
        if *steps > MATCHING_STEP_BUDGET {
            return false;
        }
        let Some(&v) = order.iter().find(|&&v| mate[v] == usize::MAX) else {
            return true;
        };
        for &w in &options[v] {
            if mate[w] == usize::MAX {
                mate[v] = w;
                mate[w] = v;
                if search(order, options, mate, steps) {
                    return true;
                }
                mate[v] = usize::MAX;
                mate[w] = usize::MAX;
            }
        }
        false
    }
    search(&order, &options, &mut mate, &mut steps).then_some(mate)
}

/// Orients every edge along an Euler circuit of its component.
fn euler_orientation(adjacency: &[BTreeSet<usize>], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, set) in adjacency.iter().enumerate() {
        for &v in set.iter().filter(|&&v| u < v) {
            incident[u].push(edges.len());
            incident[v].push(edges.len());
            edges.push((u, v));
        }
    }
    for list in &mut incident {
        list.shuffle(rng);
    }
    let mut used = vec![false; edges.len()];
    let mut cursor = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    let mut starts: Vec<usize> = (0..n).collect();
    starts.shuffle(rng);
    for start in starts {
        // Hierholzer: each edge is oriented in the direction it is first walked.
        let mut stack = vec![start];
        while let Some(&v) = stack.last() {
            let mut advanced = false;
            while cursor[v] < incident[v].len() {
                let e = incident[v][cursor[v]];
                cursor[v] += 1;
                if used[e] {
                    continue;
                }
                used[e] = true;
                let (a, b) = edges[e];
                let w = if a == v { b } else { a };
                out[v].push(w);
                stack.push(w);
                advanced = true;
                break;
            }
            if !advanced {
                stack.pop();
            }
        }
    }
    out
}

/// Perfect matching in the bipartite graph `out-copy → in-copy` by
/// augmenting paths; returns `σ` with `σ(v) ∈ out[v]`.
fn bipartite_perfect_matching(out: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = out.len();
    let mut owner = vec![usize::MAX; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    fn augment(v: usize, out: &[Vec<usize>], owner: &mut [usize], visited: &mut [bool]) -> bool {
        for &w in &out[v] {
            if visited[w] {
                continue;
            }
            visited[w] = true;
            if owner[w] == usize::MAX || augment(owner[w], out, owner, visited) {
                owner[w] = v;
                return true;
            }
        }
        false
    }
    for v in order {
        let mut visited = vec![false; n];
        if !augment(v, out, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut sigma = vec![0; n];
    for (w, &v) in owner.iter().enumerate() {
        sigma[v] = w;
    }
    Some(sigma)
}
