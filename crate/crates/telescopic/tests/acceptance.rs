//! Full-scale acceptance run: one test per criterion, each printing a
//! single ACCEPTANCE line (visible with --nocapture) and failing the
//! target when its criterion fails.

use telescopic::verify::{run_verify, VerifyConfig};

fn run(id: &'static str) {
    let cfg = VerifyConfig {
        seed: 42,
        quick: false,
        trials_override: None,
        suites: Some(vec![id.to_string()]),
    };
    let outcomes = run_verify(&cfg).expect("criterion id is known");
    assert_eq!(outcomes.len(), 1);
    let o = &outcomes[0];
    println!(
        "ACCEPTANCE {}: {}  {}",
        o.id,
        if o.passed { "PASS" } else { "FAIL" },
        o.summary
    );
    for f in &o.failures {
        println!("    {f}");
    }
    assert!(o.passed, "{}: {:#?}", o.id, o.failures);
}

#[test]
fn acceptance_engine_equivalence() {
    run("engine-equivalence");
}

#[test]
fn acceptance_index_identities() {
    run("index-identities");
}

#[test]
fn acceptance_disconnection_rule() {
    run("disconnection-rule");
}

#[test]
fn acceptance_grid_oracle() {
    run("grid-oracle");
}

#[test]
fn acceptance_xy_closed_form() {
    run("xy-closed-form");
}

#[test]
fn acceptance_tau_values() {
    run("tau-values");
}

#[test]
fn acceptance_tau_convergence() {
    run("tau-convergence");
}

#[test]
fn acceptance_kink_detection() {
    run("kink-detection");
}

#[test]
fn acceptance_strong_field_collapse() {
    run("strong-field-collapse");
}

#[test]
fn acceptance_betti_sandwich() {
    run("betti-sandwich");
}

#[test]
fn acceptance_small_leg_stability() {
    run("small-leg-stability");
}
