//! Domain types: instances, correspondence and body graphs, frameworks and
//! Euclidean transforms.
//!
//! Node ids and patch ids are 1-based at the instance/JSON boundary
//! (`1..=N`, `1..=M`). Graph vertices are 0-based: vertex `v` is node `v + 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::{harness, Error, Result};

/// Default congruence/equivalence tolerance, relative to configuration diameter.
pub const DEFAULT_CONGRUENCE_TOL: f64 = 1e-8;
/// Relative tolerance for the numerical affine-rank test on patch coordinates.
pub const DEGENERACY_TOL: f64 = 1e-9;

pub type LocalCoords = BTreeMap<usize, BTreeMap<usize, Vec<f64>>>;

/// Full input to the registration problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub dimension: usize,
    pub num_nodes: usize,
    pub patches: Vec<Vec<usize>>,
    /// `local_coords[patch][node]`, defined exactly on the node/patch incidences.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_coords: Option<LocalCoords>,
}

impl Instance {
    pub fn new(dimension: usize, num_nodes: usize, patches: Vec<Vec<usize>>) -> Self {
        Self {
            dimension,
            num_nodes,
            patches,
            local_coords: None,
        }
    }

    pub fn num_patches(&self) -> usize {
        self.patches.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    /// Local coordinates of `node` in `patch` (both 1-based).
    pub fn local_point(&self, patch: usize, node: usize) -> Option<DVector<f64>> {
        self.local_coords
            .as_ref()?
            .get(&patch)?
            .get(&node)
            .map(|p| DVector::from_column_slice(p))
    }

    pub fn correspondence_graph(&self) -> Result<CorrespondenceGraph> {
        CorrespondenceGraph::from_instance(self)
    }

    /// Drops repeated patches (as node sets), keeping first occurrences.
    /// Returns `(kept, duplicate)` 1-based patch id pairs for each dropped patch.
    pub fn dedup_patches(&self) -> (Instance, Vec<(usize, usize)>) {
        let mut first: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut dups = Vec::new();
        let mut patches = Vec::new();
        let mut coords = self.local_coords.as_ref().map(|_| LocalCoords::new());
        for (i, p) in self.patches.iter().enumerate() {
            let key: BTreeSet<usize> = p.iter().copied().collect();
            if let Some(&kept) = first.get(&key) {
                dups.push((kept, i + 1));
                continue;
            }
            first.insert(key, i + 1);
            patches.push(p.clone());
            if let (Some(out), Some(src)) = (coords.as_mut(), self.local_coords.as_ref()) {
                if let Some(m) = src.get(&(i + 1)) {
                    out.insert(patches.len(), m.clone());
                }
            }
        }
        let inst = Instance {
            dimension: self.dimension,
            num_nodes: self.num_nodes,
            patches,
            local_coords: coords,
        };
        (inst, dups)
    }
}

/// One problem found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroDimension,
    NoPatches,
    EmptyPatch {
        patch: usize,
    },
    NodeOutOfRange {
        patch: usize,
        node: usize,
    },
    RepeatedNode {
        patch: usize,
        node: usize,
    },
    OrphanNode {
        node: usize,
    },
    /// Patch with fewer than `d + 1` nodes.
    TooFewNodes {
        patch: usize,
        size: usize,
        required: usize,
    },
    /// Patch coordinates whose affine span is not all of `R^d`.
    DegeneratePatch {
        patch: usize,
        affine_rank: usize,
    },
    MalformedCoords {
        detail: String,
    },
}

impl Violation {
    /// Violations that break the `d + 1` non-degenerate nodes per patch assumption.
    pub fn breaks_a1(&self) -> bool {
        matches!(
            self,
            Violation::EmptyPatch { .. }
                | Violation::TooFewNodes { .. }
                | Violation::DegeneratePatch { .. }
        )
    }

    /// Violations that make the instance unusable for analysis.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Violation::ZeroDimension
                | Violation::NoPatches
                | Violation::NodeOutOfRange { .. }
                | Violation::OrphanNode { .. }
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// `(kept, duplicate)` patch ids of identical patches.
    pub duplicate_patches: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn a1_satisfied(&self) -> bool {
        !self.violations.iter().any(Violation::breaks_a1)
    }

    pub fn structural_errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.is_structural())
    }
}

/// Reports every problem with an instance; never fails.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let d = inst.dimension;
    let n = inst.num_nodes;
    let mut report = ValidationReport::default();
    let v = &mut report.violations;
    if d == 0 {
        v.push(Violation::ZeroDimension);
    }
    if inst.patches.is_empty() {
        v.push(Violation::NoPatches);
    }
    let mut covered = vec![false; n];
    for (i, patch) in inst.patches.iter().enumerate() {
        let id = i + 1;
        if patch.is_empty() {
            v.push(Violation::EmptyPatch { patch: id });
            continue;
        }
        let mut seen = BTreeSet::new();
        for &k in patch {
            if k == 0 || k > n {
                v.push(Violation::NodeOutOfRange { patch: id, node: k });
                continue;
            }
            covered[k - 1] = true;
            if !seen.insert(k) {
                v.push(Violation::RepeatedNode { patch: id, node: k });
            }
        }
        if seen.len() < d + 1 {
            v.push(Violation::TooFewNodes {
                patch: id,
                size: seen.len(),
                required: d + 1,
            });
        }
    }
    for (k, c) in covered.iter().enumerate() {
        if !c {
            v.push(Violation::OrphanNode { node: k + 1 });
        }
    }
    if let Some(coords) = &inst.local_coords {
        validate_coords(inst, coords, v);
    }
    report.duplicate_patches = inst.dedup_patches().1;
    report
}

fn validate_coords(inst: &Instance, coords: &LocalCoords, v: &mut Vec<Violation>) {
    let d = inst.dimension;
    let mut bad = |detail: String| v.push(Violation::MalformedCoords { detail });
    for (&i, m) in coords {
        let Some(patch) = i.checked_sub(1).and_then(|j| inst.patches.get(j)) else {
            bad(format!("coordinates for unknown patch {i}"));
            continue;
        };
        for (&k, p) in m {
            if !patch.contains(&k) {
                bad(format!("node {k} is not in patch {i}"));
            } else if p.len() != d {
                bad(format!(
                    "node {k} in patch {i} has {} coordinates, expected {d}",
                    p.len()
                ));
            } else if p.iter().any(|x| !x.is_finite()) {
                bad(format!("node {k} in patch {i} has non-finite coordinates"));
            }
        }
    }
    let mut degenerate = Vec::new();
    for (j, patch) in inst.patches.iter().enumerate() {
        let i = j + 1;
        let m = coords.get(&i);
        let mut missing = false;
        for &k in patch {
            if m.is_none_or(|m| !m.contains_key(&k)) {
                bad(format!("missing coordinates for node {k} in patch {i}"));
                missing = true;
            }
        }
        if missing || d == 0 || patch.len() < d + 1 {
            continue;
        }
        let pts: Vec<DVector<f64>> = patch
            .iter()
            .filter_map(|&k| m.and_then(|m| m.get(&k)))
            .filter(|p| p.len() == d)
            .map(|p| DVector::from_column_slice(p))
            .collect();
        if pts.len() == patch.len() {
            let r = affine_rank(&pts, DEGENERACY_TOL);
            if r < d {
                degenerate.push(Violation::DegeneratePatch {
                    patch: i,
                    affine_rank: r,
                });
            }
        }
    }
    v.extend(degenerate);
}

/// Dimension of the affine span of `points`, using singular values above
/// `rel_tol` times the largest centered point norm.
pub fn affine_rank(points: &[DVector<f64>], rel_tol: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let d = points[0].len();
    let centroid = points.iter().fold(DVector::zeros(d), |acc, p| acc + p) / points.len() as f64;
    let centered = DMatrix::from_columns(&points.iter().map(|p| p - &centroid).collect::<Vec<_>>());
    let scale = centered
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return 0;
    }
    centered
        .singular_values()
        .iter()
        .filter(|&&s| s > rel_tol * scale)
        .count()
}

/// Bipartite node/patch incidence graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceGraph {
    num_nodes: usize,
    /// 0-based node indices per patch, sorted and deduplicated.
    patches: Vec<Vec<usize>>,
    node_patches: Vec<Vec<usize>>,
}

impl CorrespondenceGraph {
    pub fn from_instance(inst: &Instance) -> Result<Self> {
        Self::new(inst.num_nodes, &inst.patches)
    }

    /// `patches` holds 1-based node ids.
    pub fn new(num_nodes: usize, patches: &[Vec<usize>]) -> Result<Self> {
        let mut node_patches = vec![Vec::new(); num_nodes];
        let mut out = Vec::with_capacity(patches.len());
        for (i, p) in patches.iter().enumerate() {
            let set: BTreeSet<usize> = p.iter().copied().collect();
            let mut nodes = Vec::with_capacity(set.len());
            for k in set {
                if k == 0 || k > num_nodes {
                    return Err(Error::InvalidNodeId(k));
                }
                nodes.push(k - 1);
                node_patches[k - 1].push(i);
            }
            out.push(nodes);
        }
        Ok(Self {
            num_nodes,
            patches: out,
            node_patches,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_patches(&self) -> usize {
        self.patches.len()
    }

    pub fn num_edges(&self) -> usize {
        self.patches.iter().map(Vec::len).sum()
    }

    /// 0-based node indices of the 0-based patch `i`.
    pub fn patch(&self, i: usize) -> &[usize] {
        &self.patches[i]
    }

    pub fn patches(&self) -> &[Vec<usize>] {
        &self.patches
    }

    /// 0-based patch indices containing the 0-based node `k`.
    pub fn patches_of(&self, k: usize) -> &[usize] {
        &self.node_patches[k]
    }

    pub fn contains(&self, node: usize, patch: usize) -> bool {
        self.patches[patch].binary_search(&node).is_ok()
    }

    /// Nodes belonging to at least two patches, within patch `i`.
    pub fn participating_nodes(&self, i: usize) -> usize {
        self.patches[i]
            .iter()
            .filter(|&&k| self.node_patches[k].len() >= 2)
            .count()
    }
}

/// Graph on the nodes with an edge between any two nodes sharing a patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyGraph {
    pub graph: Graph,
    /// Vertex set of the clique induced by each patch (0-based, sorted).
    pub cliques: Vec<Vec<usize>>,
}

impl BodyGraph {
    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }
}

pub fn build_body_graph(inst: &Instance) -> Result<BodyGraph> {
    Ok(body_graph_of(&inst.correspondence_graph()?))
}

pub fn body_graph_of(cg: &CorrespondenceGraph) -> BodyGraph {
    let mut graph = Graph::new(cg.num_nodes());
    for p in cg.patches() {
        for (a, &u) in p.iter().enumerate() {
            for &v in &p[a + 1..] {
                graph.add_edge(u, v);
            }
        }
    }
    BodyGraph {
        graph,
        cliques: cg.patches().to_vec(),
    }
}

/// Points in `R^d`, indexed by 0-based vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim: usize,
    points: Vec<DVector<f64>>,
}

impl Configuration {
    pub fn new(dim: usize, points: Vec<DVector<f64>>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        Ok(Self { dim, points })
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            dim,
            rows.iter().map(|r| DVector::from_column_slice(r)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn point(&self, v: usize) -> &DVector<f64> {
        &self.points[v]
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        (&self.points[u] - &self.points[v]).norm()
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0_f64;
        for u in 0..self.len() {
            for v in u + 1..self.len() {
                best = best.max(self.distance(u, v));
            }
        }
        best
    }

    pub fn transformed(&self, t: &EuclideanTransform) -> Configuration {
        Configuration {
            dim: self.dim,
            points: self.points.iter().map(|p| t.apply(p)).collect(),
        }
    }

    fn check_compatible(&self, other: &Configuration) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.len() != other.len() {
            return Err(Error::VertexCountMismatch(self.len(), other.len()));
        }
        Ok(())
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<usize, Vec<f64>> = self
            .points
            .iter()
            .enumerate()
            .map(|(v, p)| (v + 1, p.iter().copied().collect()))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let map = BTreeMap::<usize, Vec<f64>>::deserialize(de)?;
        if map.keys().copied().ne(1..=map.len()) {
            return Err(D::Error::custom("node ids must be 1..=N"));
        }
        let dim = map.values().next().map_or(0, Vec::len);
        let rows: Vec<Vec<f64>> = map.into_values().collect();
        Configuration::from_rows(dim, &rows).map_err(D::Error::custom)
    }
}

/// A graph together with a configuration of its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    pub graph: Graph,
    pub config: Configuration,
}

impl Framework {
    pub fn new(graph: Graph, config: Configuration) -> Result<Self> {
        if graph.num_vertices() != config.len() {
            return Err(Error::VertexCountMismatch(
                graph.num_vertices(),
                config.len(),
            ));
        }
        Ok(Self { graph, config })
    }

    pub fn equivalent_to(&self, other: &Configuration, tol: f64) -> Result<bool> {
        edges_match(&self.graph, &self.config, other, tol)
    }
}

/// `x -> q x + t` with orthogonal `q`; reflections allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanTransform {
    pub q: DMatrix<f64>,
    pub t: DVector<f64>,
}

impl EuclideanTransform {
    pub const ORTHOGONALITY_TOL: f64 = 1e-8;

    pub fn new(q: DMatrix<f64>, t: DVector<f64>) -> Result<Self> {
        let d = q.nrows();
        if q.ncols() != d || t.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if q.ncols() != d { q.ncols() } else { t.len() },
            });
        }
        let err = (q.transpose() * &q - DMatrix::identity(d, d)).amax();
        if err > Self::ORTHOGONALITY_TOL {
            return Err(Error::InvalidParameters(format!(
                "matrix is not orthogonal (|QᵀQ - I| = {err:e})"
            )));
        }
        Ok(Self { q, t })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            q: DMatrix::identity(d, d),
            t: DVector::zeros(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.q * x + &self.t
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &EuclideanTransform) -> EuclideanTransform {
        EuclideanTransform {
            q: &self.q * &other.q,
            t: &self.q * &other.t + &self.t,
        }
    }

    pub fn inverse(&self) -> EuclideanTransform {
        let qt = self.q.transpose();
        let t = -(&qt * &self.t);
        EuclideanTransform { q: qt, t }
    }

    pub fn det(&self) -> f64 {
        self.q.determinant()
    }

    pub fn is_reflection(&self) -> bool {
        self.det() < 0.0
    }
}

#[derive(Serialize, Deserialize)]
struct TransformRepr {
    q: Vec<Vec<f64>>,
    t: Vec<f64>,
}

impl Serialize for EuclideanTransform {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TransformRepr {
            q: self
                .q
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            t: self.t.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EuclideanTransform {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TransformRepr::deserialize(de)?;
        let d = r.t.len();
        if r.q.len() != d || r.q.iter().any(|row| row.len() != d) {
            return Err(D::Error::custom("transform matrix must be d x d"));
        }
        let q = DMatrix::from_fn(d, d, |i, j| r.q[i][j]);
        EuclideanTransform::new(q, DVector::from_vec(r.t)).map_err(D::Error::custom)
    }
}

/// Global coordinates plus one transform per patch: `x_k = R_i(x_{k,i})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub global_coords: Configuration,
    pub transforms: Vec<EuclideanTransform>,
}

impl Solution {
    /// Maximum of `|x_k - R_i(x_{k,i})|` over all incidences.
    pub fn residual(&self, inst: &Instance) -> Result<f64> {
        if inst.local_coords.is_none() {
            return Err(Error::MissingCoordinates);
        }
        if self.transforms.len() != inst.num_patches() || self.global_coords.len() != inst.num_nodes
        {
            return Err(Error::MalformedInstance(
                "solution does not match instance size".into(),
            ));
        }
        let mut worst = 0.0_f64;
        for (i, patch) in inst.patches.iter().enumerate() {
            for &k in patch {
                let local = inst
                    .local_point(i + 1, k)
                    .ok_or_else(|| Error::MalformedInstance(format!("missing x[{k},{}]", i + 1)))?;
                let r = (self.global_coords.point(k - 1) - self.transforms[i].apply(&local)).norm();
                worst = worst.max(r);
            }
        }
        Ok(worst)
    }

    /// Applies `g` to the global coordinates and post-composes every patch transform.
    pub fn transformed(&self, g: &EuclideanTransform) -> Solution {
        Solution {
            global_coords: self.global_coords.transformed(g),
            transforms: self.transforms.iter().map(|r| g.compose(r)).collect(),
        }
    }
}

fn edges_match(g: &Graph, x: &Configuration, y: &Configuration, tol: f64) -> Result<bool> {
    x.check_compatible(y)?;
    if g.num_vertices() != x.len() {
        return Err(Error::VertexCountMismatch(g.num_vertices(), x.len()));
    }
    let abs = tol * x.diameter().max(f64::MIN_POSITIVE);
    Ok(g.edges()
        .all(|(u, v)| (x.distance(u, v) - y.distance(u, v)).abs() <= abs))
}

/// Every body-graph edge has the same length in `x` and `y`, within `tol`
/// times the diameter of `x`.
pub fn frameworks_equivalent(
    bg: &BodyGraph,
    x: &Configuration,
    y: &Configuration,
    tol: f64,
) -> Result<bool> {
    edges_match(&bg.graph, x, y, tol)
}

/// All pairwise distances agree within `tol` times the diameter of `x`.
/// When they do, also returns a transform taking `x` onto `y`.
pub fn configs_congruent(
    x: &Configuration,
    y: &Configuration,
    tol: f64,
) -> Result<(bool, Option<EuclideanTransform>)> {
    let g = Graph::complete(x.len());
    if !edges_match(&g, x, y, tol)? {
        return Ok((false, None));
    }
    if x.is_empty() {
        return Ok((true, Some(EuclideanTransform::identity(x.dim()))));
    }
    let t = harness::align(x.points(), y.points(), true)?;
    Ok((true, Some(t)))
}
