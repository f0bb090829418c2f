//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use qexpander::dualcayley::DualGroupAlgebra;
use qexpander::graphs::Graph;
use qexpander::groups::{parse_permutation, FiniteGroup};
use qexpander::{ComplexMatrix, C64};

/// The graph corpus: cycles, complete graphs, Petersen, the 3-cube and two
/// seeded random 4-regular graphs on 12 vertices.
pub fn corpus() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 5..=12 {
        out.push((format!("C{n}"), Graph::cycle(n)));
    }
    for n in 4..=8 {
        out.push((format!("K{n}"), Graph::complete(n)));
    }
    out.push(("petersen".into(), Graph::petersen()));
    out.push(("cube3".into(), Graph::hypercube(3)));
    for seed in [1, 2] {
        out.push((
            format!("random4_12_s{seed}"),
            Graph::random_regular(12, 4, seed).expect("4-regular graph on 12 vertices"),
        ));
    }
    out
}

/// `h(G)` by plain enumeration of every vertex subset of size at most `n/2`.
pub fn brute_force_expansion(graph: &Graph) -> f64 {
    let n = graph.vertex_count();
    let edges = graph.edges();
    let mut best = f64::INFINITY;
    for mask in 1u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size > n / 2 {
            continue;
        }
        let boundary = edges
            .iter()
            .filter(|&&(u, v)| ((mask >> u) & 1) != ((mask >> v) & 1))
            .count();
        best = best.min(boundary as f64 / size as f64);
    }
    best
}

/// Second adjacency eigenvalue of the cycle `C_n`.
pub fn cycle_lambda2(n: usize) -> f64 {
    2.0 * (2.0 * std::f64::consts::PI / n as f64).cos()
}

/// Second adjacency eigenvalue of `Cay(S_k, transpositions)`: the content sum
/// of the partition `(k−1, 1)`, `C(k,2) − k`.
pub fn transposition_cayley_lambda2(k: usize) -> f64 {
    (k * (k - 1) / 2) as f64 - k as f64
}

pub fn s4() -> FiniteGroup {
    FiniteGroup::symmetric(4)
}

/// `A₅ = ⟨(1 2 3 4 5), (1 2 3)⟩` with `S = {a, a⁻¹, b, b⁻¹}`.
pub fn a5_with_set() -> (FiniteGroup, Vec<usize>) {
    let a = parse_permutation("(1 2 3 4 5)", 5).unwrap();
    let b = parse_permutation("(1 2 3)", 5).unwrap();
    let group = FiniteGroup::from_permutation_generators(&[a.clone(), b.clone()]).unwrap();
    let ia = group.find_permutation(&a).unwrap();
    let ib = group.find_permutation(&b).unwrap();
    let set = vec![ia, group.inv(ia), ib, group.inv(ib)];
    (group, set)
}

/// Character of the standard 2-dimensional representation of `S₃`:
/// number of fixed points minus one.
pub fn s3_standard_character(group: &FiniteGroup, g: usize) -> f64 {
    let p = group.permutation(g).expect("permutation group");
    p.iter().enumerate().filter(|&(i, &x)| i == x).count() as f64 - 1.0
}

pub fn block_diag(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(off + i, off + j)] = b[(i, j)];
            }
        }
        off += b.rows();
    }
    out
}

/// `a ⋆ b = (ω_a∘Ŝ ⊗ id)Δ̂(b)` computed from the definitions: `Δ̂(λ_g) = λ_g⊗λ_g`,
/// `Ŝ(λ_g) = λ_{g⁻¹}`, and `ω_a(y) = ĥ(ya)` with `ĥ = Σ_x dim x·Tr_x` evaluated
/// on block forms.
pub fn slow_convolution(alg: &DualGroupAlgebra, a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = alg.order();
    let group = alg.group();
    let a_blocks = alg.block_form(a);
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (g, &bg) in b.iter().enumerate() {
        if bg.norm_sqr() == 0.0 {
            continue;
        }
        let g_inv = group.inv(g);
        let mut pairing = C64::new(0.0, 0.0);
        for (x, blk) in alg.irreps().iter().zip(&a_blocks) {
            pairing += (x.matrix(g_inv) * blk).trace() * x.dimension() as f64;
        }
        out[g] += bg * pairing;
    }
    out
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Sorts descending and compares entrywise.
pub fn same_multiset(mut a: Vec<f64>, mut b: Vec<f64>, tol: f64) -> bool {
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}
