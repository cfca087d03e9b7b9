//! Vertex connectivity and quasi connectivity through unit-capacity max-flow.
//!
//! Both quantities reduce to counting internally disjoint paths (Menger):
//! every capacity-constrained vertex is split into an in-copy and an
//! out-copy joined by a unit arc, and every undirected edge becomes two
//! opposite arcs between out- and in-copies. For quasi connectivity only the
//! node side of the correspondence graph is split; patch vertices may be
//! shared between paths.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::model::CorrespondenceGraph;
use crate::{Error, Result};

const UNBOUNDED: u32 = u32::MAX / 2;

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
}

/// Directed network with integer capacities and a residual representation.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        Self {
            arcs: vec![Vec::new(); n],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.arcs.len()
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u32) {
        let rev_from = self.arcs[to].len() + usize::from(from == to);
        let rev_to = self.arcs[from].len();
        self.arcs[from].push(Arc {
            to,
            cap,
            rev: rev_from,
        });
        self.arcs[to].push(Arc {
            to: from,
            cap: 0,
            rev: rev_to,
        });
    }

    /// Vertex-split network of an undirected graph: vertex `v` becomes
    /// `2v` (in) and `2v + 1` (out) with a unit arc between them.
    pub fn vertex_split(g: &Graph) -> Self {
        let mut net = Self::new(2 * g.num_vertices());
        for v in 0..g.num_vertices() {
            net.add_arc(2 * v, 2 * v + 1, 1);
        }
        for (u, v) in g.edges() {
            net.add_arc(2 * u + 1, 2 * v, UNBOUNDED);
            net.add_arc(2 * v + 1, 2 * u, UNBOUNDED);
        }
        net
    }

    /// Maximum flow by BFS augmenting paths, stopping once `limit` is reached.
    pub fn max_flow(&mut self, source: usize, sink: usize, limit: u32) -> u32 {
        let n = self.arcs.len();
        let mut flow = 0;
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
        while flow < limit {
            pred.iter_mut().for_each(|p| *p = None);
            let mut queue = VecDeque::from([source]);
            let mut reached = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for (idx, a) in self.arcs[u].iter().enumerate() {
                    if a.cap > 0 && a.to != source && pred[a.to].is_none() {
                        pred[a.to] = Some((u, idx));
                        if a.to == sink {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(a.to);
                    }
                }
            }
            if !reached {
                break;
            }
            let mut bottleneck = limit - flow;
            let mut v = sink;
            while let Some((u, idx)) = pred[v] {
                bottleneck = bottleneck.min(self.arcs[u][idx].cap);
                v = u;
            }
            let mut v = sink;
            while let Some((u, idx)) = pred[v] {
                let rev = self.arcs[u][idx].rev;
                self.arcs[u][idx].cap -= bottleneck;
                self.arcs[v][rev].cap += bottleneck;
                v = u;
            }
            flow += bottleneck;
        }
        flow
    }
}

/// Maximum number of paths between patches `i` and `j` (1-based) of the
/// correspondence graph that pairwise share no node vertex.
pub fn s_disjoint_path_count(cg: &CorrespondenceGraph, i: usize, j: usize) -> Result<usize> {
    let m = cg.num_patches();
    for p in [i, j] {
        if p == 0 || p > m {
            return Err(Error::InvalidPatchId(p));
        }
    }
    if i == j {
        return Err(Error::InvalidParameters(format!(
            "patch pair must be distinct, got ({i}, {j})"
        )));
    }
    let n = cg.num_nodes();
    let patch_vertex = |p: usize| 2 * n + p;
    let mut net = FlowNetwork::new(2 * n + m);
    for k in 0..n {
        net.add_arc(2 * k, 2 * k + 1, 1);
    }
    for p in 0..m {
        for &k in cg.patch(p) {
            net.add_arc(patch_vertex(p), 2 * k, 1);
            net.add_arc(2 * k + 1, patch_vertex(p), 1);
        }
    }
    let limit = cg.patch(i - 1).len().min(cg.patch(j - 1).len()) as u32;
    Ok(net.max_flow(patch_vertex(i - 1), patch_vertex(j - 1), limit) as usize)
}

/// Quasi connectivity of a correspondence graph; vacuous with fewer than
/// two patches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuasiConnectivity {
    Vacuous,
    Value(usize),
}

impl QuasiConnectivity {
    /// `true` when every patch pair has at least `k` S-disjoint paths
    /// (vacuously so with fewer than two patches).
    pub fn at_least(self, k: usize) -> bool {
        match self {
            Self::Vacuous => true,
            Self::Value(q) => q >= k,
        }
    }

    pub fn value(self) -> Option<usize> {
        match self {
            Self::Vacuous => None,
            Self::Value(q) => Some(q),
        }
    }
}

impl fmt::Display for QuasiConnectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vacuous => f.write_str("vacuous"),
            Self::Value(q) => write!(f, "{q}"),
        }
    }
}

impl Serialize for QuasiConnectivity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Vacuous => s.serialize_str("vacuous"),
            Self::Value(q) => s.serialize_u64(*q as u64),
        }
    }
}

impl<'de> Deserialize<'de> for QuasiConnectivity {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(de)? {
            serde_json::Value::String(s) if s == "vacuous" => Ok(Self::Vacuous),
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|q| Self::Value(q as usize))
                .ok_or_else(|| D::Error::custom("quasi connectivity must be a count")),
            other => Err(D::Error::custom(format!("unexpected value {other}"))),
        }
    }
}

/// Minimum over all patch pairs of [`s_disjoint_path_count`].
pub fn quasi_connectivity(cg: &CorrespondenceGraph) -> QuasiConnectivity {
    let m = cg.num_patches();
    if m < 2 {
        return QuasiConnectivity::Vacuous;
    }
    let mut best = usize::MAX;
    for i in 1..=m {
        for j in i + 1..=m {
            let c = s_disjoint_path_count(cg, i, j).expect("patch ids in range");
            best = best.min(c);
            if best == 0 {
                return QuasiConnectivity::Value(0);
            }
        }
    }
    QuasiConnectivity::Value(best)
}

/// Maximum number of internally disjoint `a`–`b` paths. For adjacent
/// vertices the edge itself counts as one path.
pub fn local_vertex_connectivity(g: &Graph, a: usize, b: usize) -> Result<usize> {
    let n = g.num_vertices();
    if a >= n || b >= n {
        return Err(Error::InvalidNodeId(a.max(b)));
    }
    if a == b {
        return Err(Error::InvalidParameters("endpoints must differ".into()));
    }
    if g.has_edge(a, b) {
        let mut h = g.clone();
        h.remove_edge(a, b);
        return Ok(split_flow(&h, a, b) + 1);
    }
    Ok(split_flow(g, a, b))
}

fn split_flow(g: &Graph, a: usize, b: usize) -> usize {
    let mut net = FlowNetwork::vertex_split(g);
    let limit = g.degree(a).min(g.degree(b)) as u32;
    net.max_flow(2 * a + 1, 2 * b, limit) as usize
}

/// Largest `k` such that `g` is `k`-connected: more than `k` vertices, and
/// deleting fewer than `k` of them leaves it connected. `K_n` gives `n - 1`.
///
/// Fixes a minimum-degree vertex `v`; a minimum separator either misses `v`
/// (and then separates `v` from some non-neighbour) or contains it (and then
/// separates two non-adjacent neighbours of `v`).
pub fn vertex_connectivity(g: &Graph) -> Result<usize> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::TooFewVertices {
            needed: 2,
            found: n,
        });
    }
    if g.is_complete() {
        return Ok(n - 1);
    }
    let v = (0..n).min_by_key(|&u| g.degree(u)).expect("nonempty");
    let mut best = g.degree(v);
    for w in 0..n {
        if w != v && !g.has_edge(v, w) {
            best = best.min(split_flow(g, v, w));
            if best == 0 {
                return Ok(0);
            }
        }
    }
    let nbrs: Vec<usize> = g.neighbors(v).collect();
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !g.has_edge(x, y) {
                best = best.min(split_flow(g, x, y));
            }
        }
    }
    Ok(best)
}

pub fn is_k_connected(g: &Graph, k: usize) -> bool {
    let n = g.num_vertices();
    if n <= k {
        return false;
    }
    if k == 0 {
        return true;
    }
    vertex_connectivity(g).is_ok_and(|c| c >= k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::model::{build_body_graph, Instance};

    fn cg(n: usize, patches: &[&[usize]]) -> CorrespondenceGraph {
        CorrespondenceGraph::new(n, &patches.iter().map(|p| p.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn example1_p1_p4_has_four_paths() {
        let c = instances::gen_example1().correspondence_graph().unwrap();
        assert_eq!(s_disjoint_path_count(&c, 1, 4).unwrap(), 4);
    }

    #[test]
    fn disjoint_patches_have_no_paths() {
        assert_eq!(
            s_disjoint_path_count(&cg(4, &[&[1, 2], &[3, 4]]), 1, 2).unwrap(),
            0
        );
    }

    #[test]
    fn shared_nodes_are_paths() {
        for m in 0..5 {
            let a: Vec<usize> = (1..=m + 2).collect();
            let b: Vec<usize> = (3..=m + 4).collect();
            let shared = a.iter().filter(|k| b.contains(k)).count();
            assert_eq!(
                s_disjoint_path_count(&cg(m + 4, &[&a, &b]), 1, 2).unwrap(),
                shared
            );
        }
    }

    #[test]
    fn invalid_patch_ids() {
        let c = cg(3, &[&[1, 2], &[2, 3]]);
        assert!(matches!(
            s_disjoint_path_count(&c, 0, 1),
            Err(Error::InvalidPatchId(0))
        ));
        assert!(matches!(
            s_disjoint_path_count(&c, 1, 3),
            Err(Error::InvalidPatchId(3))
        ));
        assert!(s_disjoint_path_count(&c, 2, 2).is_err());
    }

    #[test]
    fn quasi_connectivity_of_worked_instances() {
        let q = |inst: Instance| quasi_connectivity(&inst.correspondence_graph().unwrap());
        assert_eq!(q(instances::gen_example1()), QuasiConnectivity::Value(4));
        assert_eq!(q(instances::gen_example2()), QuasiConnectivity::Value(4));
        assert_eq!(q(instances::gen_fig2()), QuasiConnectivity::Value(3));
        assert_eq!(
            q(Instance::new(2, 3, vec![vec![1, 2, 3]])),
            QuasiConnectivity::Vacuous
        );
    }

    #[test]
    fn single_shared_node_gives_one() {
        let c = cg(5, &[&[1, 2, 3], &[3, 4, 5]]);
        assert_eq!(quasi_connectivity(&c), QuasiConnectivity::Value(1));
    }

    #[test]
    fn quasi_connectivity_serializes_as_number_or_sentinel() {
        assert_eq!(
            serde_json::to_string(&QuasiConnectivity::Value(4)).unwrap(),
            "4"
        );
        assert_eq!(
            serde_json::to_string(&QuasiConnectivity::Vacuous).unwrap(),
            "\"vacuous\""
        );
        let back: QuasiConnectivity = serde_json::from_str("\"vacuous\"").unwrap();
        assert_eq!(back, QuasiConnectivity::Vacuous);
    }

    #[test]
    fn complete_and_path_graphs() {
        for n in 2..8 {
            assert_eq!(vertex_connectivity(&Graph::complete(n)).unwrap(), n - 1);
        }
        assert_eq!(vertex_connectivity(&Graph::path(5)).unwrap(), 1);
        assert_eq!(vertex_connectivity(&Graph::new(3)).unwrap(), 0);
        assert!(vertex_connectivity(&Graph::new(1)).is_err());
    }

    #[test]
    fn example1_body_graph_is_exactly_four_connected() {
        let bg = build_body_graph(&instances::gen_example1()).unwrap();
        assert_eq!(vertex_connectivity(&bg.graph).unwrap(), 4);
        assert!(is_k_connected(&bg.graph, 4));
        assert!(!is_k_connected(&bg.graph, 5));
    }

    #[test]
    fn k_connected_thresholds() {
        let k5 = build_body_graph(&instances::gen_fig2()).unwrap().graph;
        assert!(is_k_connected(&k5, 3));
        assert!(is_k_connected(&k5, 4));
        assert!(!is_k_connected(&k5, 5));
        assert!(!is_k_connected(&Graph::complete(3), 3));
        assert!(is_k_connected(&Graph::new(1), 0));
    }

    #[test]
    fn adjacent_pair_counts_the_edge() {
        // 4-cycle plus chord 0-2: paths 0-2, 0-1-2, 0-3-2.
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        assert_eq!(local_vertex_connectivity(&g, 0, 2).unwrap(), 3);
        assert_eq!(local_vertex_connectivity(&g, 1, 3).unwrap(), 2);
    }
}
