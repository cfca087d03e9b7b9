//! Verdict engine: is an instance uniquely registrable?
//!
//! Under the `d + 1` non-degenerate nodes per patch assumption, unique
//! registrability is equivalent to generic global rigidity of the body
//! graph. In the plane this collapses to 3-connectivity of the body graph,
//! which is the deterministic verdict of record there; the randomized
//! stress test still runs as a cross-check.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::connectivity::{quasi_connectivity, vertex_connectivity, QuasiConnectivity};
use crate::model::{body_graph_of, validate_instance, Instance, ValidationReport};
use crate::rigidity::{
    hendrickson_check, is_generically_globally_rigid, is_generically_locally_rigid,
    is_redundantly_rigid, HendricksonReport,
};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    /// Planar: 3-connectivity of the body graph.
    D2Connectivity,
    /// Randomized generic global rigidity of the body graph.
    GeneralGhr,
    /// A single distinct patch carries every node.
    SmallComplete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub a1_satisfied: bool,
    pub quasi_connectivity: QuasiConnectivity,
    /// `None` for a body graph with fewer than two vertices.
    pub body_connectivity: Option<usize>,
    /// `None` when the body graph has fewer than `d + 2` vertices.
    pub hendrickson: Option<HendricksonReport>,
    pub locally_rigid: bool,
    pub redundantly_rigid: bool,
    pub globally_rigid: bool,
    /// `None` when A1 fails and theory gives no verdict.
    pub uniquely_registrable: Option<bool>,
    pub method: Method,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Full analysis of an instance. Structural problems (zero dimension, no
/// patches, out-of-range ids, orphan nodes) are errors; A1 failures are not.
pub fn analyze(inst: &Instance, seed: u64) -> Result<Verdict> {
    let report = validate_instance(inst);
    if let Some(v) = report.structural_errors().next() {
        return Err(Error::MalformedInstance(format!("{v:?}")));
    }
    let d = inst.dimension;
    let a1 = report.a1_satisfied();
    let mut notes = validation_notes(&report);

    let (distinct, _) = inst.dedup_patches();
    let cg = distinct.correspondence_graph()?;
    let bg = body_graph_of(&cg);
    let g = &bg.graph;
    let n = g.num_vertices();

    let quasi = quasi_connectivity(&cg);
    let body_connectivity = vertex_connectivity(g).ok();
    let sub = |tag: u64| seed::derive(seed, tag);
    let locally_rigid = is_generically_locally_rigid(g, d, sub(1));
    let redundantly_rigid = is_redundantly_rigid(g, d, sub(2));
    let globally_rigid = is_generically_globally_rigid(g, d, sub(3));
    let hendrickson = hendrickson_check(g, d, sub(2)).ok();
    if hendrickson.is_some_and(|h| h.both()) && !globally_rigid {
        notes.push(
            "H-graph: both necessary conditions hold but the body graph is not globally rigid"
                .into(),
        );
    }

    match find_laterated_order(inst) {
        Some(order) => notes.push(format!("lateration order found (heuristic): {order:?}")),
        None => notes.push("no lateration order found (greedy heuristic, not a proof)".into()),
    }

    let (uniquely_registrable, method) = if !a1 {
        notes.push("A1 violated: uniqueness is undetermined; graph diagnostics only".into());
        (None, Method::GeneralGhr)
    } else if distinct.num_patches() == 1 {
        (Some(true), Method::SmallComplete)
    } else if d == 2 {
        let by_connectivity = body_connectivity.is_some_and(|k| k >= 3) && n > 3;
        if by_connectivity != globally_rigid {
            notes.push(format!(
                "cross-check disagreement: 3-connectivity says {by_connectivity}, stress test says {globally_rigid}"
            ));
        }
        (Some(by_connectivity), Method::D2Connectivity)
    } else {
        (Some(globally_rigid), Method::GeneralGhr)
    };

    Ok(Verdict {
        a1_satisfied: a1,
        quasi_connectivity: quasi,
        body_connectivity,
        hendrickson,
        locally_rigid,
        redundantly_rigid,
        globally_rigid,
        uniquely_registrable,
        method,
        notes,
    })
}

fn validation_notes(report: &ValidationReport) -> Vec<String> {
    let mut notes: Vec<String> = report
        .violations
        .iter()
        .map(|v| format!("violation: {v:?}"))
        .collect();
    for (kept, dup) in &report.duplicate_patches {
        notes.push(format!(
            "patch {dup} duplicates patch {kept}; dropped before analysis"
        ));
    }
    notes
}

/// Greedy search for a lateration order: start from any patch with `d + 1`
/// nodes, then keep appending a patch sharing `d + 1` nodes with the union so
/// far. With local coordinates the shared nodes must also be affinely
/// non-degenerate in that patch. `None` does not prove that no order exists.
///
/// Returns 1-based patch ids.
pub fn find_laterated_order(inst: &Instance) -> Option<Vec<usize>> {
    let d = inst.dimension;
    let m = inst.num_patches();
    let sets: Vec<BTreeSet<usize>> = inst
        .patches
        .iter()
        .map(|p| p.iter().copied().collect())
        .collect();
    let enough = |i: usize, nodes: &BTreeSet<usize>| -> bool {
        let shared: Vec<usize> = sets[i].intersection(nodes).copied().collect();
        shared.len() > d && non_degenerate(inst, i, &shared)
    };
    'roots: for root in 0..m {
        if !enough(root, &sets[root]) {
            continue;
        }
        let mut order = vec![root];
        let mut used = vec![false; m];
        used[root] = true;
        let mut union = sets[root].clone();
        while order.len() < m {
            let Some(next) = (0..m).find(|&j| !used[j] && enough(j, &union)) else {
                continue 'roots;
            };
            used[next] = true;
            order.push(next);
            union.extend(sets[next].iter().copied());
        }
        return Some(order.into_iter().map(|i| i + 1).collect());
    }
    None
}

fn non_degenerate(inst: &Instance, patch: usize, nodes: &[usize]) -> bool {
    if inst.local_coords.is_none() {
        return true;
    }
    let pts: Option<Vec<_>> = nodes
        .iter()
        .map(|&k| inst.local_point(patch + 1, k))
        .collect();
    pts.is_some_and(|p| {
        crate::model::affine_rank(&p, crate::model::DEGENERACY_TOL) == inst.dimension
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_example1, gen_example2, gen_fig1, gen_fig2};

    #[test]
    fn fig2_is_uniquely_registrable_by_connectivity() {
        let v = analyze(&gen_fig2(), 1).unwrap();
        assert_eq!(v.uniquely_registrable, Some(true));
        assert_eq!(v.method, Method::D2Connectivity);
        assert!(v.globally_rigid);
        assert_eq!(v.quasi_connectivity, QuasiConnectivity::Value(3));
    }

    #[test]
    fn example1_is_not_uniquely_registrable() {
        let v = analyze(&gen_example1(), 1).unwrap();
        assert_eq!(v.quasi_connectivity, QuasiConnectivity::Value(4));
        assert!(!v.globally_rigid);
        assert_eq!(v.uniquely_registrable, Some(false));
        assert_eq!(v.method, Method::GeneralGhr);
    }

    #[test]
    fn example2_is_an_h_graph() {
        let v = analyze(&gen_example2(), 1).unwrap();
        assert_eq!(
            v.hendrickson,
            Some(HendricksonReport {
                connected_d_plus_1: true,
                redundantly_rigid: true
            })
        );
        assert!(!v.globally_rigid);
        assert!(v.notes.iter().any(|n| n.starts_with("H-graph")));
    }

    #[test]
    fn fig1_is_undetermined() {
        let v = analyze(&gen_fig1(), 1).unwrap();
        assert!(!v.a1_satisfied);
        assert_eq!(v.uniquely_registrable, None);
        assert_ne!(v.method, Method::D2Connectivity);
    }

    #[test]
    fn single_patch_is_small_complete() {
        let inst = Instance::new(2, 4, vec![vec![1, 2, 3, 4], vec![4, 3, 2, 1]]);
        let v = analyze(&inst, 0).unwrap();
        assert_eq!(v.method, Method::SmallComplete);
        assert_eq!(v.uniquely_registrable, Some(true));
        assert!(v.notes.iter().any(|n| n.contains("duplicates")));
    }

    #[test]
    fn malformed_instances_are_errors() {
        assert!(analyze(&Instance::new(2, 4, vec![vec![1, 2, 3]]), 0).is_err());
        assert!(analyze(&Instance::new(0, 1, vec![vec![1]]), 0).is_err());
    }

    #[test]
    fn lateration_examples() {
        assert_eq!(find_laterated_order(&gen_fig2()), None);
        let chain = Instance::new(
            2,
            7,
            vec![vec![1, 2, 3], vec![1, 2, 3, 4, 5], vec![3, 4, 5, 6, 7]],
        );
        assert_eq!(find_laterated_order(&chain), Some(vec![1, 2, 3]));
        let single = Instance::new(3, 4, vec![vec![1, 2, 3, 4]]);
        assert_eq!(find_laterated_order(&single), Some(vec![1]));
    }

    #[test]
    fn verdict_json_has_exact_fields() {
        let v = analyze(&gen_fig2(), 1).unwrap();
        let json: serde_json::Value = serde_json::from_str(&v.to_json().unwrap()).unwrap();
        let keys: Vec<&str> = json
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(
            keys.iter().copied().collect::<BTreeSet<_>>(),
            [
                "a1_satisfied",
                "quasi_connectivity",
                "body_connectivity",
                "hendrickson",
                "locally_rigid",
                "redundantly_rigid",
                "globally_rigid",
                "uniquely_registrable",
                "method",
                "notes"
            ]
            .into_iter()
            .collect()
        );
        assert_eq!(json["method"], "D2_CONNECTIVITY");
    }
}
