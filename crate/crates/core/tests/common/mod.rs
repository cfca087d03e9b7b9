//! Independent brute-force oracles and random inputs shared by the
//! property and acceptance suites. Nothing here calls the flow or rank code
//! under test.

#![allow(dead_code)]

use netreg::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Graph on `n` vertices whose edges are those selected by `mask` in the
/// lexicographic order of pairs `(u, v)`, `u < v`.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut g = Graph::new(n);
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                g.add_edge(u, v);
            }
            bit += 1;
        }
    }
    g
}

fn connected_avoiding(g: &Graph, removed: u64, from: usize, to: Option<usize>) -> bool {
    let n = g.num_vertices();
    let mut seen = removed | 1 << from;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for v in g.neighbors(u) {
            if seen >> v & 1 == 0 {
                seen |= 1 << v;
                stack.push(v);
            }
        }
    }
    match to {
        Some(t) => seen >> t & 1 == 1,
        None => seen.count_ones() as usize == n,
    }
}

/// Smallest vertex set whose removal disconnects `g`, by enumeration of all
/// subsets in order of size; `n - 1` for complete graphs.
pub fn brute_force_connectivity(g: &Graph) -> usize {
    let n = g.num_vertices();
    assert!(n <= 20);
    let mut best = n - 1;
    for s in 0u64..1 << n {
        let size = s.count_ones() as usize;
        if size >= best || size + 2 > n {
            continue;
        }
        let start = (0..n).find(|&v| s >> v & 1 == 0).unwrap();
        if !connected_avoiding(g, s, start, None) {
            best = size;
        }
    }
    best
}

/// Smallest vertex set separating non-adjacent `a` and `b`.
pub fn brute_force_local_cut(g: &Graph, a: usize, b: usize) -> usize {
    assert!(!g.has_edge(a, b) && a != b);
    let n = g.num_vertices();
    let mut best = n - 2;
    for s in 0u64..1 << n {
        if s >> a & 1 == 1 || s >> b & 1 == 1 {
            continue;
        }
        let size = s.count_ones() as usize;
        if size < best && !connected_avoiding(g, s, a, Some(b)) {
            best = size;
        }
    }
    best
}

/// Generic rigidity in the plane by the Laman count: some set of `2n - 3`
/// edges is (2,3)-sparse. Exhaustive over edge subsets; for small `n` only.
pub fn laman_rigid(g: &Graph) -> bool {
    let n = g.num_vertices();
    if n <= 1 {
        return true;
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let need = 2 * n - 3;
    if edges.len() < need {
        return false;
    }
    assert!(edges.len() <= 21);
    // for each vertex subset of size >= 2: (edge mask inside it, allowed count)
    let inside: Vec<(u64, u32)> = (0u64..1 << n)
        .filter(|v| v.count_ones() >= 2)
        .map(|v| {
            let mask = edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| v >> a & 1 == 1 && v >> b & 1 == 1)
                .fold(0u64, |m, (i, _)| m | 1 << i);
            (mask, 2 * v.count_ones() - 3)
        })
        .collect();
    (0u64..1 << edges.len())
        .filter(|c| c.count_ones() as usize == need)
        .any(|c| {
            inside
                .iter()
                .all(|&(mask, cap)| (c & mask).count_ones() <= cap)
        })
}

/// All vertex pairs, for enumerating edges to add or delete.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}
