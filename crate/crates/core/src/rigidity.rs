//! Randomized generic rigidity tests in exact prime-field arithmetic.
//!
//! Generic properties are decided at a random point of a random field of
//! size about `2^61`. Rank can only drop at an unlucky point, so "rigid"
//! answers are certified by the rank itself and the remaining error is
//! one-sided, bounded by Schwartz–Zippel. Every test repeats [`TRIALS`]
//! times with independent primes and configurations.
//!
//! Global rigidity uses the equilibrium-stress certificate: a generic
//! framework on at least `d + 2` vertices is globally rigid iff some
//! equilibrium stress has a stress matrix of rank `N - d - 1`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::connectivity::is_k_connected;
use crate::field::{ModMatrix, PrimeField};
use crate::graph::Graph;
use crate::{seed, Error, Result};

pub const TRIALS: u64 = 3;
/// Relative singular-value cutoff of the floating-point diagnostic rank.
pub const FLOAT_RANK_TOL: f64 = 1e-9;

/// Configuration with coordinates in a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularConfig {
    pub field: PrimeField,
    pub dim: usize,
    /// `coords[v][axis]`.
    pub coords: Vec<Vec<u64>>,
}

/// Independent uniform coordinates for every vertex, in a prime field drawn
/// from `seed`.
pub fn sample_generic_config(g: &Graph, d: usize, seed: u64) -> ModularConfig {
    let mut rng = seed::rng(seed);
    let field = PrimeField::random(&mut rng);
    let coords = (0..g.num_vertices())
        .map(|_| (0..d).map(|_| field.random_element(&mut rng)).collect())
        .collect();
    ModularConfig {
        field,
        dim: d,
        coords,
    }
}

/// One row per edge (in [`Graph::edges`] order), `d·N` columns.
pub fn rigidity_matrix(g: &Graph, cfg: &ModularConfig) -> ModMatrix {
    let f = cfg.field;
    let d = cfg.dim;
    let mut m = ModMatrix::zeros(f, g.num_edges(), d * g.num_vertices());
    for (row, (u, v)) in g.edges().enumerate() {
        for a in 0..d {
            let diff = f.sub(cfg.coords[u][a], cfg.coords[v][a]);
            m.set(row, d * u + a, diff);
            m.set(row, d * v + a, f.neg(diff));
        }
    }
    m
}

/// Rank `dN - d(d+1)/2` of a generically rigid framework on `N ≥ d` vertices.
pub fn full_rigidity_rank(n: usize, d: usize) -> usize {
    if n <= d {
        n * n.saturating_sub(1) / 2
    } else {
        d * n - d * (d + 1) / 2
    }
}

fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed::derive(seed, trial)
}

/// Generic rank of the rigidity matrix: the maximum over [`TRIALS`] sampled
/// configurations.
pub fn rigidity_rank(g: &Graph, d: usize, seed: u64) -> usize {
    let cap = g.num_edges().min(full_rigidity_rank(g.num_vertices(), d));
    let mut best = 0;
    for t in 0..TRIALS {
        let r = rigidity_matrix(g, &sample_generic_config(g, d, trial_seed(seed, t))).rank();
        best = best.max(r);
        if best >= cap {
            break;
        }
    }
    best
}

pub fn is_generically_locally_rigid(g: &Graph, d: usize, seed: u64) -> bool {
    let n = g.num_vertices();
    if n <= d + 1 {
        return g.is_complete();
    }
    rigidity_rank(g, d, seed) == full_rigidity_rank(n, d)
}

/// Rigid, and still rigid after deleting any single edge.
pub fn is_redundantly_rigid(g: &Graph, d: usize, seed: u64) -> bool {
    let n = g.num_vertices();
    if !is_generically_locally_rigid(g, d, seed) {
        return false;
    }
    if n <= d + 1 {
        // Deleting an edge of a complete graph this small leaves it incomplete.
        return g.num_edges() == 0;
    }
    let target = full_rigidity_rank(n, d);
    let matrices: Vec<ModMatrix> = (0..TRIALS)
        .map(|t| {
            rigidity_matrix(
                g,
                &sample_generic_config(g, d, trial_seed(seed ^ 0x5eed, t)),
            )
        })
        .collect();
    (0..g.num_edges()).all(|e| matrices.iter().any(|m| m.without_row(e).rank() == target))
}

/// A random element of the equilibrium-stress space at `cfg` (one weight per
/// edge, in [`Graph::edges`] order), or `None` if the space is trivial.
pub fn sample_equilibrium_stress<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &ModularConfig,
    rng: &mut R,
) -> Option<Vec<u64>> {
    let f = cfg.field;
    let basis = rigidity_matrix(g, cfg).left_null_space();
    if basis.is_empty() {
        return None;
    }
    let mut stress = vec![0; g.num_edges()];
    for b in &basis {
        let c = f.random_element(rng);
        for (s, &x) in stress.iter_mut().zip(b) {
            *s = f.add(*s, f.mul(c, x));
        }
    }
    Some(stress)
}

/// `Ω[u][v] = -ω_uv` on edges, `Ω[u][u] = Σ_v ω_uv`.
pub fn stress_matrix(g: &Graph, stress: &[u64], field: PrimeField) -> ModMatrix {
    let n = g.num_vertices();
    let mut m = ModMatrix::zeros(field, n, n);
    for ((u, v), &w) in g.edges().zip(stress) {
        m.set(u, v, field.neg(w));
        m.set(v, u, field.neg(w));
        m.set(u, u, field.add(m.get(u, u), w));
        m.set(v, v, field.add(m.get(v, v), w));
    }
    m
}

pub fn is_generically_globally_rigid(g: &Graph, d: usize, seed: u64) -> bool {
    let n = g.num_vertices();
    if n <= d + 1 {
        return g.is_complete();
    }
    if !is_generically_locally_rigid(g, d, seed) {
        return false;
    }
    let target = full_rigidity_rank(n, d);
    for t in 0..TRIALS {
        let s = trial_seed(seed ^ 0x57e55, t);
        let cfg = sample_generic_config(g, d, s);
        if rigidity_matrix(g, &cfg).rank() != target {
            continue;
        }
        let mut rng = seed::rng(seed::derive(s, 1));
        let Some(stress) = sample_equilibrium_stress(g, &cfg, &mut rng) else {
            continue;
        };
        if stress_matrix(g, &stress, cfg.field).rank() == n - d - 1 {
            return true;
        }
    }
    false
}

/// The two necessary conditions for generic global rigidity on `≥ d + 2`
/// vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HendricksonReport {
    pub connected_d_plus_1: bool,
    pub redundantly_rigid: bool,
}

impl HendricksonReport {
    pub fn both(&self) -> bool {
        self.connected_d_plus_1 && self.redundantly_rigid
    }
}

pub fn hendrickson_check(g: &Graph, d: usize, seed: u64) -> Result<HendricksonReport> {
    let n = g.num_vertices();
    if n < d + 2 {
        return Err(Error::TooFewVertices {
            needed: d + 2,
            found: n,
        });
    }
    Ok(HendricksonReport {
        connected_d_plus_1: is_k_connected(g, d + 1),
        redundantly_rigid: is_redundantly_rigid(g, d, seed),
    })
}

/// `g` plus one vertex adjacent to every original vertex.
pub fn cone(g: &Graph) -> Graph {
    let mut h = g.clone();
    let apex = h.add_vertex();
    for v in 0..apex {
        h.add_edge(apex, v);
    }
    h
}

/// `g` plus one vertex adjacent to exactly the vertices of `clique`.
pub fn add_vertex_on_clique(g: &Graph, clique: &[usize]) -> Result<Graph> {
    if !g.is_clique(clique) {
        return Err(Error::NotAClique(clique.to_vec()));
    }
    let mut h = g.clone();
    let v = h.add_vertex();
    for &u in clique {
        h.add_edge(v, u);
    }
    Ok(h)
}

/// Floating-point rigidity rank at a uniform random configuration in the unit
/// cube. Diagnostic only; verdicts use the exact rank.
pub fn float_rigidity_rank(g: &Graph, d: usize, seed: u64) -> usize {
    let mut rng = seed::rng(seed);
    let n = g.num_vertices();
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    if edges.is_empty() || d == 0 {
        return 0;
    }
    let m = DMatrix::from_fn(edges.len(), d * n, |row, col| {
        let (u, v) = edges[row];
        let (w, a) = (col / d, col % d);
        if w == u {
            coords[u][a] - coords[v][a]
        } else if w == v {
            coords[v][a] - coords[u][a]
        } else {
            0.0
        }
    });
    let sv = m.singular_values();
    let smax = sv.max();
    sv.iter().filter(|&&s| s > FLOAT_RANK_TOL * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::model::build_body_graph;

    fn fig6() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    }

    fn body(inst: crate::Instance) -> Graph {
        build_body_graph(&inst).unwrap().graph
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let g = Graph::complete(3);
        assert_eq!(
            sample_generic_config(&g, 2, 9),
            sample_generic_config(&g, 2, 9)
        );
        assert_ne!(
            sample_generic_config(&g, 2, 9),
            sample_generic_config(&g, 2, 10)
        );
        let c = sample_generic_config(&g, 2, 11);
        assert_eq!(c.coords.iter().flatten().count(), 6);
        assert!(c.coords.iter().flatten().all(|&x| x != 0));
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rigidity_rank(&Graph::complete(2), 1, 1), 1);
        assert_eq!(rigidity_rank(&Graph::complete(3), 2, 1), 3);
        assert_eq!(rigidity_rank(&body(instances::gen_example1()), 3, 1), 30);
    }

    #[test]
    fn rigidity_rows_annihilate_trivial_motions() {
        let g = body(instances::gen_fig2());
        let cfg = sample_generic_config(&g, 2, 4);
        let r = rigidity_matrix(&g, &cfg);
        let f = cfg.field;
        // translation along x
        let tx: Vec<u64> = (0..10).map(|c| u64::from(c % 2 == 0)).collect();
        assert!(r.mul_vec(&tx).iter().all(|&v| v == 0));
        // infinitesimal rotation (x, y) -> (-y, x)
        let rot: Vec<u64> = (0..5)
            .flat_map(|v| [f.neg(cfg.coords[v][1]), cfg.coords[v][0]])
            .collect();
        assert!(r.mul_vec(&rot).iter().all(|&v| v == 0));
        for row in 0..r.rows() {
            assert_eq!(r.row(row).iter().filter(|&&x| x != 0).count(), 4);
        }
    }

    #[test]
    fn local_rigidity_examples() {
        assert!(is_generically_locally_rigid(&Graph::complete(3), 2, 0));
        assert!(is_generically_locally_rigid(&fig6(), 2, 0));
        assert!(!is_generically_locally_rigid(&fig6(), 3, 0));
        assert!(!is_generically_locally_rigid(&Graph::path(3), 2, 0));
    }

    #[test]
    fn redundant_rigidity_examples() {
        assert!(is_redundantly_rigid(&Graph::complete(4), 2, 0));
        assert!(!is_redundantly_rigid(&Graph::complete(3), 2, 0));
        assert!(!is_redundantly_rigid(&fig6(), 2, 0));
        assert!(!is_redundantly_rigid(
            &body(instances::gen_example1()),
            3,
            0
        ));
    }

    #[test]
    fn global_rigidity_examples() {
        for d in 1..4 {
            assert!(is_generically_globally_rigid(&Graph::complete(d + 2), d, 5));
        }
        assert!(is_generically_globally_rigid(
            &body(instances::gen_fig2()),
            2,
            5
        ));
        assert!(!is_generically_globally_rigid(&fig6(), 2, 5));
        assert!(!is_generically_globally_rigid(
            &body(instances::gen_example1()),
            3,
            5
        ));
        assert!(is_generically_globally_rigid(&Graph::complete(3), 2, 5));
        assert!(!is_generically_globally_rigid(&Graph::path(3), 2, 5));
    }

    #[test]
    fn hendrickson_examples() {
        let k5 = Graph::complete(5);
        let both = HendricksonReport {
            connected_d_plus_1: true,
            redundantly_rigid: true,
        };
        assert_eq!(hendrickson_check(&k5, 2, 1).unwrap(), both);
        assert_eq!(
            hendrickson_check(&body(instances::gen_example1()), 3, 1).unwrap(),
            HendricksonReport {
                connected_d_plus_1: true,
                redundantly_rigid: false
            }
        );
        assert!(hendrickson_check(&Graph::complete(4), 3, 1).is_err());
    }

    #[test]
    fn stress_matrix_annihilates_ones_and_coordinates() {
        let g = Graph::complete(5);
        let cfg = sample_generic_config(&g, 2, 8);
        let mut rng = seed::rng(1);
        let w = sample_equilibrium_stress(&g, &cfg, &mut rng).unwrap();
        let om = stress_matrix(&g, &w, cfg.field);
        assert!(om.mul_vec(&[1; 5]).iter().all(|&v| v == 0));
        for a in 0..2 {
            let col: Vec<u64> = cfg.coords.iter().map(|p| p[a]).collect();
            assert!(om.mul_vec(&col).iter().all(|&v| v == 0));
        }
        assert_eq!(om.rank(), 5 - 2 - 1);
    }

    #[test]
    fn coning_counts() {
        let g = body(instances::gen_example1());
        let c = cone(&g);
        assert_eq!(c.num_vertices(), g.num_vertices() + 1);
        assert_eq!(c.num_edges(), g.num_edges() + g.num_vertices());
        assert_eq!(cone(&Graph::complete(4)), Graph::complete(5));
    }

    #[test]
    fn clique_attachment() {
        let g = Graph::complete(4);
        let h = add_vertex_on_clique(&g, &[0, 1, 2]).unwrap();
        assert_eq!(h.degree(4), 3);
        assert!(is_k_connected(&h, 3));
        assert!(matches!(
            add_vertex_on_clique(&Graph::path(3), &[0, 2]),
            Err(Error::NotAClique(_))
        ));
    }

    #[test]
    fn float_rank_matches_exact_rank_on_small_graphs() {
        for g in [Graph::complete(5), fig6(), body(instances::gen_example1())] {
            for d in 2..4 {
                assert_eq!(float_rigidity_rank(&g, d, 3), rigidity_rank(&g, d, 3));
            }
        }
    }
}
