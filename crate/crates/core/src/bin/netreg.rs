use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use netreg::harness::{probe_uniqueness, solve_registration, SolveConfig};
use netreg::instances::{self, synth_reg_instance};
use netreg::{analyze, selftest, Error, Instance, Result, Verdict};

const EXIT_INPUT_ERROR: u8 = 3;

/// Decide and probe unique registrability of patch-based networks.
#[derive(Parser)]
#[command(name = "netreg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze an instance. Exit 0 = uniquely registrable, 1 = not,
    /// 2 = undetermined (A1 violated), 3 = input error.
    Analyze {
        path: PathBuf,
        /// Analyze in this dimension instead of the file's.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
    },
    /// Write a generated instance: fig1, fig2, example1, example2, ring,
    /// random, hgraph.
    Generate {
        name: String,
        /// Ring: number of patches.
        #[arg(long)]
        m: Option<usize>,
        /// Ring: patch size.
        #[arg(long)]
        s: Option<usize>,
        /// Ring: overlap between consecutive patches.
        #[arg(long)]
        o: Option<usize>,
        /// Random cover: number of nodes.
        #[arg(long)]
        nodes: Option<usize>,
        /// Random cover: number of patches.
        #[arg(long)]
        patches: Option<usize>,
        /// Dimension (random, hgraph; overrides the default elsewhere).
        #[arg(long)]
        dim: Option<usize>,
        /// Random cover: minimum patch size (default d + 1).
        #[arg(long)]
        min_patch: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Attach synthetic local coordinates; ground truth goes to a sidecar.
        #[arg(long)]
        synth: bool,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Output path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ground-truth sidecar path (default `<out>.truth.json`).
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Solve the registration system. Exit 0 = converged, 1 = not, 3 = input error.
    Solve {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve repeatedly and compare solutions. Exit 0 = all congruent,
    /// 1 = non-congruence witness, 2 = no converged solution, 3 = input error.
    Probe {
        path: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run the built-in worked-example suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct SolverArgs {
    /// JSON solver config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Residual acceptance tolerance, relative to the configuration diameter.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
}

impl SolverArgs {
    fn resolve(&self) -> Result<SolveConfig> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            None => SolveConfig::default(),
        };
        if let Some(t) = self.tol {
            cfg.residual_tol = t;
        }
        if let Some(m) = self.max_iterations {
            cfg.max_iterations = m;
        }
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Analyze {
            path,
            dim,
            seed,
            json: _,
            text,
        } => {
            let mut inst = Instance::load(&path)?;
            if let Some(d) = dim {
                inst.dimension = d;
            }
            let verdict = analyze(&inst, seed)?;
            if text {
                print!("{}", render_text(&verdict));
            } else {
                println!("{}", verdict.to_json()?);
            }
            Ok(match verdict.uniquely_registrable {
                Some(true) => 0,
                Some(false) => 1,
                None => 2,
            })
        }
        Command::Generate {
            name,
            m,
            s,
            o,
            nodes,
            patches,
            dim,
            min_patch,
            seed,
            synth,
            noise,
            out,
            truth,
        } => {
            let need = |v: Option<usize>, flag: &str| {
                v.ok_or_else(|| Error::InvalidParameters(format!("`{name}` needs --{flag}")))
            };
            let mut inst = match name.as_str() {
                "fig1" => instances::gen_fig1(),
                "fig2" => instances::gen_fig2(),
                "example1" => instances::gen_example1(),
                "example2" => instances::gen_example2(),
                "ring" => instances::gen_ring(need(m, "m")?, need(s, "s")?, need(o, "o")?)?,
                "random" => {
                    let d = need(dim, "dim")?;
                    instances::gen_random_cover(
                        need(nodes, "nodes")?,
                        need(patches, "patches")?,
                        d,
                        min_patch.unwrap_or(d + 1),
                        seed,
                    )?
                }
                "hgraph" => instances::gen_hgraph(need(dim, "dim")?)?,
                other => return Err(Error::UnknownGenerator(other.to_string())),
            };
            if let Some(d) = dim {
                inst.dimension = d;
            }
            if synth {
                if inst.local_coords.is_some() {
                    inst.local_coords = None;
                }
                let (with_coords, ground_truth) = synth_reg_instance(&inst, seed, noise)?;
                inst = with_coords;
                let sidecar =
                    truth.or_else(|| out.as_ref().map(|p| p.with_extension("truth.json")));
                if let Some(p) = sidecar {
                    std::fs::write(p, serde_json::to_string_pretty(&ground_truth)? + "\n")?;
                }
            }
            match out {
                Some(p) => inst.save(p)?,
                None => println!("{}", inst.to_json()?),
            }
            Ok(0)
        }
        Command::Solve { path, seed, solver } => {
            let inst = Instance::load(&path)?;
            let report = solve_registration(&inst, seed, &solver.resolve()?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.converged { 0 } else { 1 })
        }
        Command::Probe {
            path,
            trials,
            seed,
            solver,
        } => {
            let inst = Instance::load(&path)?;
            let cfg = solver.resolve()?;
            let report = probe_uniqueness(&inst, trials, seed, cfg.residual_tol, &cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.witness.is_some() {
                1
            } else if report.solutions_found == 0 {
                2
            } else {
                0
            })
        }
        Command::Selftest { seed } => {
            let checks = selftest::run(seed)?;
            for c in &checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                println!("{mark}  {}  {}", c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) {
                0
            } else {
                1
            })
        }
    }
}

fn render_text(v: &Verdict) -> String {
    let opt = |x: Option<bool>| x.map_or("undetermined".to_string(), |b| b.to_string());
    let mut s = String::new();
    s += &format!("uniquely_registrable: {}\n", opt(v.uniquely_registrable));
    s += &format!("method: {:?}\n", v.method);
    s += &format!("a1_satisfied: {}\n", v.a1_satisfied);
    s += &format!("quasi_connectivity: {}\n", v.quasi_connectivity);
    s += &format!(
        "body_connectivity: {}\n",
        v.body_connectivity.map_or("n/a".into(), |k| k.to_string())
    );
    match &v.hendrickson {
        Some(h) => {
            s += &format!(
                "hendrickson: connected_d_plus_1={} redundantly_rigid={}\n",
                h.connected_d_plus_1, h.redundantly_rigid
            )
        }
        None => s += "hendrickson: n/a\n",
    }
    s += &format!(
        "rigidity: local={} redundant={} global={}\n",
        v.locally_rigid, v.redundantly_rigid, v.globally_rigid
    );
    for n in &v.notes {
        s += &format!("note: {n}\n");
    }
    s
}
