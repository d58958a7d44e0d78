//! End-to-end checks of the command line interface: worked examples,
//! output formats, determinism, and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telescopic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).expect("valid json")
}

#[test]
fn betti_json_worked_example() {
    let doc = json(&["betti", "--lengths", "1,1,1,1/2"]);
    assert_eq!(doc["n"], 4);
    assert_eq!(doc["dimension"], 1);
    assert_eq!(doc["b"], serde_json::json!([2, 0, 0]));
    assert_eq!(doc["total"], 2);
    assert_eq!(doc["euler"], 2);
    assert_eq!(doc["generic"], true);
    assert_eq!(doc["disconnected"], true);
}

#[test]
fn betti_accepts_separate_telescopic_and_engines_match() {
    let a = stdout(&["betti", "--lengths", "1,1,5,5,5", "--telescopic", "1/2"]);
    let b = stdout(&["betti", "--lengths", "1,1,5,5,5,1/2"]);
    assert_eq!(a, b);
    let by_enum = stdout(&[
        "betti",
        "--lengths",
        "1,1,5,5,5,1/2",
        "--engine",
        "enumeration",
    ]);
    let by_dp = stdout(&[
        "betti",
        "--lengths",
        "1,1,5,5,5,1/2",
        "--engine",
        "subset-sum",
    ]);
    assert_eq!(by_enum, by_dp);
    let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["b"], serde_json::json!([2, 4, 2, 0, 0]));
    assert_eq!(doc["euler"], 0);
}

#[test]
fn betti_text_mentions_every_field() {
    let text = stdout(&["betti", "--lengths", "1,1,1,2", "--format", "text"]);
    assert!(text.contains("b = [1, 2, 0]"));
    assert!(text.contains("total = 3"));
    assert!(text.contains("euler = -1"));
    assert!(text.contains("generic: yes"));
    assert!(text.contains("disconnected: no"));
}

#[test]
fn betti_irrational_leg_and_three_legs_skip_disconnection() {
    let doc = json(&["betti", "--lengths", "1,1,sqrt(2)"]);
    assert_eq!(doc["n"], 3);
    assert_eq!(doc["b"], serde_json::json!([1, 0]));
    assert!(doc.get("disconnected").is_none());
}

#[test]
fn xy_exact_worked_example() {
    let doc = json(&[
        "xy", "--rotators", "4", "--field", "2", "--energy", "0",
    ]);
    assert_eq!(doc["legs"], 6);
    assert_eq!(doc["mode"], "exact");
    assert_eq!(doc["b_total"], 11);
    assert_eq!(doc["chi"], 3);
    assert_eq!(doc["chi_sign"], 1);
    let tau = doc["tau_empirical"].as_f64().unwrap();
    assert!((tau - (11f64).ln() / 6.0).abs() < 1e-12);
}

#[test]
fn xy_log_space_has_no_integer_fields() {
    let doc = json(&[
        "xy",
        "--rotators",
        "200000",
        "--field",
        "2",
        "--energy",
        "-1",
        "--mode",
        "log-space",
    ]);
    assert!(doc.get("b_total").is_none());
    assert!(doc.get("chi").is_none());
    let tau = doc["tau_empirical"].as_f64().unwrap();
    assert!((tau - 0.5100980575778081).abs() < 5e-4);
}

#[test]
fn tau_curve_csv_shape_and_values() {
    let csv = stdout(&[
        "tau-curve",
        "--field",
        "2",
        "--from",
        "-1",
        "--to",
        "0",
        "--steps",
        "3",
        "--rotators",
        "64,256",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "v,p_v,tau_analytic,tau_64,sigma_sign_64,sigma_64,tau_256,sigma_sign_256,sigma_256"
    );
    assert!(lines[1].starts_with("-1.000000000000,"));
    assert!(lines[3].starts_with("0.000000000000,0.500000000000,0.693147180560,"));
    for line in &lines[1..] {
        assert_eq!(line.matches(',').count(), 8);
    }
}

#[test]
fn kink_reports_the_transition_at_zero() {
    let doc = json(&["kink", "--field", "1"]);
    assert_eq!(doc["steps"], 101);
    assert_eq!(doc["analytic"]["index"], 50);
    assert_eq!(doc["analytic"]["v"].as_f64().unwrap(), 0.0);
    let jump = doc["analytic"]["second_diff_jump"].as_f64().unwrap();
    assert!((jump - 1.0).abs() < 0.1);
}

#[test]
fn oracle_b0_counts_components() {
    let doc = json(&["oracle-b0", "--lengths", "1,1,1,1/2"]);
    assert_eq!(doc["components"], 2);
    let doc = json(&["oracle-b0", "--lengths", "1,1,1,2"]);
    assert_eq!(doc["components"], 1);
}

#[test]
fn oracle_enum_streams_the_full_table() {
    let csv = stdout(&["oracle-enum", "--lengths", "1,1,1,2"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 17);
    assert_eq!(lines[0], "mask,size,sum,class");
    assert_eq!(lines[1], "0,0,0,short");
    assert_eq!(lines[16], "15,4,5,long");
    assert_eq!(lines[9], "8,1,2,short");

    let csv = stdout(&["oracle-enum", "--lengths", "1,1,1,1"]);
    let medians: Vec<&str> = csv
        .lines()
        .filter(|line| line.ends_with(",median"))
        .collect();
    assert_eq!(medians.len(), 6);
    assert!(medians.contains(&"3,2,2,median"));
}

#[test]
fn verify_quick_passes_and_is_deterministic() {
    let args = [
        "verify",
        "--quick",
        "--suites",
        "engine-equivalence,disconnection-rule",
    ];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    assert!(a.contains("criterion engine-equivalence: PASS"));
    assert!(a.ends_with("2 of 2 criteria passed\n"));
}

#[test]
fn verify_json_format_parses() {
    let doc = json(&[
        "verify",
        "--quick",
        "--format",
        "json",
        "--suites",
        "tau-values",
    ]);
    assert_eq!(doc[0]["id"], "tau-values");
    assert_eq!(doc[0]["passed"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["betti", "--lengths", "3/2,1,2,sqrt(2)"],
        vec![
            "tau-curve", "--field", "1", "--from", "-1/4", "--to", "1/4", "--steps", "5",
            "--rotators", "64",
        ],
        vec!["xy", "--rotators", "100", "--field", "1/2", "--energy", "-1/16"],
    ] {
        assert_eq!(stdout(&args), stdout(&args));
    }
}

#[test]
fn output_flag_writes_the_same_bytes() {
    let dir = std::env::temp_dir().join("telescopic-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("betti.json");
    let direct = stdout(&["betti", "--lengths", "1,1,1,2"]);
    let out = run(&[
        "betti",
        "--lengths",
        "1,1,1,2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn domain_errors_exit_one_with_a_message() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["betti", "--lengths", "1,1"],
        vec!["betti", "--lengths", "1,1,0"],
        vec!["betti", "--lengths", "1,1,bogus"],
        vec!["betti", "--lengths", "1,sqrt(2),sqrt(3),1"],
        vec!["xy", "--rotators", "4", "--field", "2", "--energy", "99"],
        vec!["xy", "--rotators", "4", "--field", "1/8", "--energy", "0"],
        vec!["oracle-b0", "--lengths", "1,1,1,1"],
        vec!["verify", "--suites", "no-such-suite"],
        vec![
            "tau-curve", "--field", "2", "--from", "0", "--to", "0", "--steps", "3",
            "--rotators", "64",
        ],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error: "), "{args:?}: {err}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["betti"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}
