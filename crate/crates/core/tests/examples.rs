//! Runs every example's `run_example` and checks the headline outcome.

#[allow(dead_code)]
#[path = "../examples/analyze_worked_examples.rs"]
mod analyze_worked_examples;
#[allow(dead_code)]
#[path = "../examples/hgraph_coning.rs"]
mod hgraph_coning;
#[allow(dead_code)]
#[path = "../examples/lateration.rs"]
mod lateration;
#[allow(dead_code)]
#[path = "../examples/quasi_connectivity.rs"]
mod quasi_connectivity;
#[allow(dead_code)]
#[path = "../examples/registration_probe.rs"]
mod registration_probe;
#[allow(dead_code)]
#[path = "../examples/rigidity_basics.rs"]
mod rigidity_basics;

#[test]
fn worked_examples_verdicts() {
    let got: Vec<_> = analyze_worked_examples::run_example()
        .unwrap()
        .into_iter()
        .map(|(name, v)| (name, v.uniquely_registrable))
        .collect();
    assert_eq!(
        got,
        [
            ("fig1", None),
            ("fig2", Some(true)),
            ("example1", Some(false)),
            ("example2", Some(false))
        ]
    );
}

#[test]
fn quasi_matches_body_connectivity_threshold() {
    for r in quasi_connectivity::run_example().unwrap() {
        let q = r.quasi.unwrap();
        assert!(q <= r.kappa, "{}", r.label);
        for k in 1..=r.min_patch {
            assert_eq!(q >= k, r.kappa >= k, "{} k={k}", r.label);
        }
    }
}

#[test]
fn coning_preserves_h_graphs() {
    let levels = hgraph_coning::run_example().unwrap();
    assert_eq!(levels.len(), 3);
    for l in levels {
        assert_eq!(l.kappa, l.dim + 1);
        assert!(l.hendrickson.both());
        assert!(!l.globally_rigid);
    }
}

#[test]
fn lateration_outcome() {
    let o = lateration::run_example().unwrap();
    assert_eq!(o.chain_order, Some(vec![1, 2, 3, 4]));
    assert!(o.chain_stitch_residual < 1e-10);
    assert_eq!(o.fig2_order, None);
    assert_eq!(o.fig2_registrable, Some(true));
}

#[test]
fn probe_outcome() {
    let r = registration_probe::run_example().unwrap();
    assert!(r[0].1.pairwise_congruent && r[0].1.solutions_found > 1);
    assert!(r[1].1.witness.is_some());
}

#[test]
fn rigidity_rows() {
    let flags: Vec<_> = rigidity_basics::run_example()
        .into_iter()
        .map(|r| (r.local, r.redundant, r.global))
        .collect();
    assert_eq!(
        flags,
        [
            (true, false, false),
            (false, false, false),
            (true, true, true),
            (true, false, false)
        ]
    );
}
