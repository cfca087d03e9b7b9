//! Quasi connectivity of the correspondence graph against vertex
//! connectivity of the body graph, on ring networks and random covers.

use netreg::connectivity::{quasi_connectivity, s_disjoint_path_count, vertex_connectivity};
use netreg::instances::{gen_random_cover, gen_ring};
use netreg::model::body_graph_of;
use netreg::{Instance, Result};

pub struct Row {
    pub label: String,
    pub min_patch: usize,
    pub quasi: Option<usize>,
    pub kappa: usize,
}

fn row(label: String, inst: &Instance) -> Result<Row> {
    let cg = inst.correspondence_graph()?;
    let bg = body_graph_of(&cg);
    Ok(Row {
        label,
        min_patch: inst.patches.iter().map(Vec::len).min().unwrap_or(0),
        quasi: quasi_connectivity(&cg).value(),
        kappa: vertex_connectivity(&bg.graph)?,
    })
}

pub fn run_example() -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (m, s, o) in [(6, 4, 2), (5, 3, 1), (8, 5, 3)] {
        rows.push(row(format!("ring m={m} s={s} o={o}"), &gen_ring(m, s, o)?)?);
    }
    for seed in 0..4 {
        let inst = gen_random_cover(16, 7, 2, 4, seed)?;
        rows.push(row(format!("random seed={seed}"), &inst)?);
    }
    Ok(rows)
}

fn main() -> Result<()> {
    let ring = gen_ring(6, 4, 2)?;
    let cg = ring.correspondence_graph()?;
    println!(
        "ring(6,4,2): S-disjoint paths between patches 1 and 4 = {}",
        s_disjoint_path_count(&cg, 1, 4)?
    );
    println!(
        "{:<24} {:>9} {:>6} {:>6}",
        "instance", "min|P_i|", "quasi", "kappa"
    );
    for r in run_example()? {
        let q = r.quasi.map_or("-".into(), |q| q.to_string());
        println!("{:<24} {:>9} {:>6} {:>6}", r.label, r.min_patch, q, r.kappa);
    }
    Ok(())
}
