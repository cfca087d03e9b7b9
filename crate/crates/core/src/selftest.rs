//! Built-in suite over the worked example networks.

use serde::Serialize;

use crate::connectivity::{quasi_connectivity, vertex_connectivity, QuasiConnectivity};
use crate::graph::Graph;
use crate::instances::{gen_example1, gen_example2, gen_fig1, gen_fig2, gen_hgraph};
use crate::model::build_body_graph;
use crate::registrability::{analyze, find_laterated_order, Method};
use crate::rigidity::{
    hendrickson_check, is_generically_globally_rigid, is_generically_locally_rigid,
    is_redundantly_rigid, rigidity_rank,
};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

pub fn run(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let fig1 = analyze(&gen_fig1(), seed)?;
    out.push(check(
        "fig1: A1 violated, verdict undetermined",
        !fig1.a1_satisfied && fig1.uniquely_registrable.is_none(),
        format!(
            "a1={} verdict={:?}",
            fig1.a1_satisfied, fig1.uniquely_registrable
        ),
    ));

    let fig2 = analyze(&gen_fig2(), seed)?;
    out.push(check(
        "fig2: uniquely registrable via 3-connectivity, not laterated",
        fig2.uniquely_registrable == Some(true)
            && fig2.method == Method::D2Connectivity
            && fig2.globally_rigid
            && find_laterated_order(&gen_fig2()).is_none(),
        format!(
            "verdict={:?} method={:?}",
            fig2.uniquely_registrable, fig2.method
        ),
    ));

    let ex1 = gen_example1();
    let b1 = build_body_graph(&ex1)?.graph;
    let q1 = quasi_connectivity(&ex1.correspondence_graph()?);
    let k1 = vertex_connectivity(&b1)?;
    let r1 = rigidity_rank(&b1, 3, seed);
    let v1 = analyze(&ex1, seed)?;
    out.push(check(
        "example1: quasi 4, 4-connected, minimally rigid, not registrable",
        q1 == QuasiConnectivity::Value(4)
            && k1 == 4
            && b1.num_edges() == 30
            && r1 == 30
            && is_generically_locally_rigid(&b1, 3, seed)
            && !is_redundantly_rigid(&b1, 3, seed)
            && !is_generically_globally_rigid(&b1, 3, seed)
            && v1.uniquely_registrable == Some(false),
        format!("quasi={q1} kappa={k1} edges={} rank={r1}", b1.num_edges()),
    ));

    let ex2 = gen_example2();
    let b2 = build_body_graph(&ex2)?.graph;
    let h2 = hendrickson_check(&b2, 3, seed)?;
    let v2 = analyze(&ex2, seed)?;
    out.push(check(
        "example2: H-graph, not registrable",
        vertex_connectivity(&b2)? == 4
            && h2.both()
            && !v2.globally_rigid
            && v2.uniquely_registrable == Some(false),
        format!("hendrickson={h2:?} globally_rigid={}", v2.globally_rigid),
    ));

    let h4 = gen_hgraph(4)?;
    let v4 = analyze(&h4, seed)?;
    out.push(check(
        "coning: 4-dimensional H-graph",
        v4.body_connectivity.is_some_and(|k| k >= 5)
            && v4.redundantly_rigid
            && !v4.globally_rigid
            && v4.uniquely_registrable == Some(false),
        format!(
            "kappa={:?} quasi={}",
            v4.body_connectivity, v4.quasi_connectivity
        ),
    ));

    let fig6 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
    out.push(check(
        "fig6: rigid but not globally rigid in the plane, flexible in space",
        is_generically_locally_rigid(&fig6, 2, seed)
            && !is_generically_globally_rigid(&fig6, 2, seed)
            && !is_generically_locally_rigid(&fig6, 3, seed),
        "",
    ));
    Ok(out)
}
