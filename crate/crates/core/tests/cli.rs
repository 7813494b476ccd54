use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eof")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Two-qubit Werner EoF from the singlet weight, via its concurrence `(3p − 1)/2`.
fn werner_eof(p: f64) -> f64 {
    let c = ((3.0 * p - 1.0) / 2.0).max(0.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn zoo_then_compute_recovers_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("werner.json");
    let out = eof(&["zoo", "werner", "--singlet-weight", "0.8", "--out", path_str(&state)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = eof(&["compute", path_str(&state), "--cut", "0", "--restarts", "8", "--ensemble"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let value = v["value"].as_f64().unwrap();
    assert!((value - werner_eof(0.8)).abs() < 1e-3, "{value} vs {}", werner_eof(0.8));
    assert!(v["ensemble"].is_array());
}

#[test]
fn four_qubit_werner_is_written_in_party_order() {
    let out = eof(&["zoo", "werner", "--four-qubit", "--phi", "-0.5"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["dims"], serde_json::json!([2, 2, 2, 2]));
}

#[test]
fn verify_csv_has_one_row_per_sample_and_component() {
    let out = eof(&["verify", "ssa", "--samples", "7", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,component,index,descriptor,gap"));
    assert_eq!(lines.count(), 14);
}

#[test]
fn relation_chain_matches_the_werner_oracle() {
    let out = eof(&["verify", "relation-chain", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let expected = werner_eof(0.9) + 1.0;
    for c in json(&out)["components"].as_array().unwrap() {
        if c["name"] != "spread" {
            assert!(c["max_abs_residual"].as_f64().unwrap() < 5e-2, "{c}");
        }
    }
    let text =
        String::from_utf8(eof(&["verify", "relation-chain", "--restarts", "4", "--format", "csv"]).stdout).unwrap();
    let line = text.lines().find(|l| l.contains("eof-eof")).unwrap();
    let estimate: f64 = line.split("estimate=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!((estimate - expected).abs() < 5e-2, "{estimate} vs {expected}");
}

#[test]
fn probes_are_deterministic_and_replayable() {
    let args = ["probe", "question2", "--source", "case2", "--trials", "12", "--seed", "5"];
    let (a, b) = (eof(&args), eof(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["semantics"], "violation-search");
    assert_eq!(v["implication"]["holds"], true);
    let instance: eof_core::probes::ProbeInstance = serde_json::from_value(v["argmin"].clone()).unwrap();
    assert!((instance.reevaluate().unwrap() - v["min_gap"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn a_found_violation_exits_1() {
    let out = eof(&["probe", "question1", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["violation_found"], true);
}

#[test]
fn superadditivity_reports_carry_the_caveat() {
    let out = eof(&["probe", "superadditivity", "--source", "werner", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let caveat = json(&out)["caveat"].as_str().unwrap().to_string();
    assert!(caveat.contains("never verifies"));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(eof(&["compute", "/no/such/file.json", "--cut", "0"]).status.code(), Some(2));
    assert_eq!(eof(&["zoo", "case1", "--lambda", "0.5,0.5;0.5,0.5"]).status.code(), Some(2));
    assert_eq!(eof(&["probe", "question1", "--source", "werner"]).status.code(), Some(2));
}

#[test]
fn config_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("eof.conf");
    std::fs::write(&cfg, "trials = 3\nseed = 11\n").unwrap();
    let v = json(&eof(&["probe", "superadditivity", "--config", path_str(&cfg), "--trials", "4"]));
    assert_eq!((v["trials"].as_u64(), v["seed"].as_u64()), (Some(4), Some(11)));
}
