//! Analyze the worked example networks and print their verdicts.

use netreg::instances::{gen_example1, gen_example2, gen_fig1, gen_fig2};
use netreg::{analyze, Instance, Result, Verdict};

pub fn run_example() -> Result<Vec<(&'static str, Verdict)>> {
    let cases: [(&str, Instance); 4] = [
        ("fig1", gen_fig1()),
        ("fig2", gen_fig2()),
        ("example1", gen_example1()),
        ("example2", gen_example2()),
    ];
    let mut out = Vec::new();
    for (name, inst) in cases {
        out.push((name, analyze(&inst, 42)?));
    }
    Ok(out)
}

fn main() -> Result<()> {
    for (name, v) in run_example()? {
        let verdict = match v.uniquely_registrable {
            Some(true) => "uniquely registrable",
            Some(false) => "NOT uniquely registrable",
            None => "undetermined (A1 violated)",
        };
        println!(
            "{name:<9} {verdict:<27} quasi={} kappa={:?} local={} redundant={} global={}",
            v.quasi_connectivity,
            v.body_connectivity,
            v.locally_rigid,
            v.redundantly_rigid,
            v.globally_rigid
        );
    }
    Ok(())
}
