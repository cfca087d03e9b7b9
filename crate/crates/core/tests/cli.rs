//! End-to-end checks of the `netreg` binary: exit codes and output stability.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn netreg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netreg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn netreg")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn generate(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let file = format!("{name}.json");
    let mut args = vec!["generate", name, "--out", &file];
    args.extend_from_slice(extra);
    let o = netreg(&args, dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir.join(file)
}

#[test]
fn analyze_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "example1", &[]);
    generate(d, "fig2", &[]);
    generate(d, "fig1", &[]);

    let o = netreg(&["analyze", "example1.json"], d);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["globally_rigid"], false);

    assert_eq!(code(&netreg(&["analyze", "fig2.json", "--text"], d)), 0);
    assert_eq!(code(&netreg(&["analyze", "fig1.json"], d)), 2);

    std::fs::write(d.join("bad.json"), "{ not json").unwrap();
    let o = netreg(&["analyze", "bad.json"], d);
    assert_eq!(code(&o), 3);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&netreg(&["analyze", "missing.json"], d)), 3);
}

#[test]
fn dim_override_changes_the_question() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "fig2", &[]);
    // the same correspondence in 3 dimensions has patches too small for A1
    assert_eq!(
        code(&netreg(&["analyze", "fig2.json", "--dim", "3"], dir.path())),
        2
    );
}

#[test]
fn generate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let e1 = netreg::Instance::load(generate(d, "example1", &[])).unwrap();
    assert_eq!(e1.patches[0], vec![1, 2, 3, 4]);
    assert_eq!(e1.patches.len(), 6);

    let h = netreg::Instance::load(generate(d, "hgraph", &["--dim", "4"])).unwrap();
    assert_eq!((h.num_nodes, h.dimension), (19, 4));

    generate(d, "fig2", &["--synth", "--seed", "4"]);
    assert!(d.join("fig2.truth.json").exists());
    let inst = netreg::Instance::load(d.join("fig2.json")).unwrap();
    let truth: netreg::Solution =
        serde_json::from_str(&std::fs::read_to_string(d.join("fig2.truth.json")).unwrap()).unwrap();
    assert!(truth.residual(&inst).unwrap() < 1e-12);

    assert_eq!(code(&netreg(&["generate", "nonesuch"], d)), 3);
    assert_eq!(
        code(&netreg(
            &["generate", "ring", "--m", "2", "--s", "3", "--o", "1"],
            d
        )),
        3
    );
    assert_eq!(code(&netreg(&["generate", "ring"], d)), 3);
}

#[test]
fn solve_and_probe_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "fig2", &["--synth", "--seed", "1"]);
    generate(d, "example1", &["--synth", "--seed", "1"]);

    let o = netreg(&["solve", "fig2.json", "--seed", "2"], d);
    assert_eq!(code(&o), 0);
    let rep: netreg::harness::SolveReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep.converged);

    assert_eq!(
        code(&netreg(&["probe", "fig2.json", "--trials", "20"], d)),
        0
    );
    let o = netreg(
        &["probe", "example1.json", "--trials", "20", "--seed", "3"],
        d,
    );
    assert_eq!(code(&o), 1);
    let rep: netreg::harness::ProbeReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep.witness.is_some());

    generate(d, "example2", &[]);
    assert_eq!(code(&netreg(&["solve", "example2.json"], d)), 3);
    assert_eq!(code(&netreg(&["probe", "example2.json"], d)), 3);
}

#[test]
fn solver_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "fig2", &["--synth"]);
    std::fs::write(
        d.join("cfg.json"),
        r#"{"restarts": 1, "polish_steps": 0, "max_iterations": 0}"#,
    )
    .unwrap();
    let o = netreg(&["solve", "fig2.json", "--config", "cfg.json"], d);
    let rep: netreg::harness::SolveReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep.attempts, 1);
    assert_eq!(rep.iterations, 0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(
        d,
        "random",
        &[
            "--nodes",
            "25",
            "--patches",
            "10",
            "--dim",
            "3",
            "--seed",
            "8",
            "--synth",
        ],
    );
    for args in [
        &["analyze", "random.json", "--seed", "5"][..],
        &["analyze", "random.json", "--seed", "5", "--text"],
        &["solve", "random.json", "--seed", "5"],
        &["probe", "random.json", "--trials", "3", "--seed", "5"],
        &[
            "generate",
            "random",
            "--nodes",
            "25",
            "--patches",
            "10",
            "--dim",
            "3",
            "--seed",
            "8",
        ],
    ] {
        let a = netreg(args, d);
        let b = netreg(args, d);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = netreg(&["selftest"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout)
        .lines()
        .all(|l| l.starts_with("PASS")));
}
