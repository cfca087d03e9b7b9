//! Generic rigidity tests on small graphs: a rigid but not globally rigid
//! quadrilateral, the complete graph, and an edge-deleted octahedron.

use netreg::rigidity::{
    full_rigidity_rank, is_generically_globally_rigid, is_generically_locally_rigid,
    is_redundantly_rigid, rigidity_rank,
};
use netreg::Graph;

pub struct Row {
    pub label: &'static str,
    pub dim: usize,
    pub rank: usize,
    pub full: usize,
    pub local: bool,
    pub redundant: bool,
    pub global: bool,
}

pub fn run_example() -> Vec<Row> {
    let quad = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
    let mut octa = Graph::complete(6);
    for (u, v) in [(0, 1), (2, 3), (4, 5)] {
        octa.remove_edge(u, v);
    }
    let cases = [
        ("quadrilateral + diagonal", quad.clone(), 2),
        ("quadrilateral + diagonal", quad, 3),
        ("K5", Graph::complete(5), 2),
        ("octahedron", octa, 3),
    ];
    cases
        .into_iter()
        .map(|(label, g, dim)| Row {
            label,
            dim,
            rank: rigidity_rank(&g, dim, 3),
            full: full_rigidity_rank(g.num_vertices(), dim),
            local: is_generically_locally_rigid(&g, dim, 3),
            redundant: is_redundantly_rigid(&g, dim, 3),
            global: is_generically_globally_rigid(&g, dim, 3),
        })
        .collect()
}

fn main() {
    for r in run_example() {
        println!(
            "{:<25} d={} rank {}/{}  local={} redundant={} global={}",
            r.label, r.dim, r.rank, r.full, r.local, r.redundant, r.global
        );
    }
}
