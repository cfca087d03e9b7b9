//! H-graphs: both Hendrickson conditions hold yet the graph is not globally
//! rigid. Coning lifts one to the next dimension.

use netreg::model::build_body_graph;
use netreg::rigidity::{cone, hendrickson_check, is_generically_globally_rigid, HendricksonReport};
use netreg::{connectivity::vertex_connectivity, instances::gen_example2, Graph, Result};

pub struct Level {
    pub dim: usize,
    pub vertices: usize,
    pub kappa: usize,
    pub hendrickson: HendricksonReport,
    pub globally_rigid: bool,
}

pub fn run_example() -> Result<Vec<Level>> {
    let mut g: Graph = build_body_graph(&gen_example2())?.graph;
    let mut levels = Vec::new();
    for dim in 3..=5 {
        levels.push(Level {
            dim,
            vertices: g.num_vertices(),
            kappa: vertex_connectivity(&g)?,
            hendrickson: hendrickson_check(&g, dim, 9)?,
            globally_rigid: is_generically_globally_rigid(&g, dim, 9),
        });
        g = cone(&g);
    }
    Ok(levels)
}

fn main() -> Result<()> {
    for l in run_example()? {
        println!(
            "d={} N={} kappa={} (d+1)-connected={} redundantly rigid={} globally rigid={}",
            l.dim,
            l.vertices,
            l.kappa,
            l.hendrickson.connected_d_plus_1,
            l.hendrickson.redundantly_rigid,
            l.globally_rigid
        );
    }
    Ok(())
}
