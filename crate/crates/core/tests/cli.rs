use std::process::Command;

use mermin_coa::cli::run;
use mermin_coa::experiments::eb_bound_check;
use mermin_coa::mermin::ghzw_mermin_curve;
use mermin_coa::states::sample_indexed;
use mermin_coa::{OptimizationConfig, SamplingMode, StateSpec};

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mermin-coa").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("bad json {e}: {text}"))
}

#[test]
fn analyze_ghz() {
    let (code, out, _) = run_args(&["analyze", "--state", "ghz"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["tau"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["coa_min"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn analyze_csv_has_one_row() {
    let (code, out, _) = run_args(&["analyze", "--state", "w", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("coa_min"));
}

#[test]
fn figure_scan_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let (code, out, err) = run_args(&[
        "scan",
        "--family",
        "ghz-w",
        "--grid",
        "0:1:101",
        "--preset",
        "ghzw-tilt",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "ghzw-tilt").unwrap();
    let mut count = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let p: f64 = fields[0].parse().unwrap();
        let value: f64 = fields[col].parse().unwrap();
        assert!((value - ghzw_mermin_curve(p).unwrap()).abs() < 1e-9, "p={p}");
        assert_eq!(value > 2.0, (0.011..=0.999).contains(&p), "p={p} value={value}");
        count += 1;
    }
    assert_eq!(count, 101);
}

#[test]
fn scan_json_with_optimizer() {
    let (code, out, err) = run_args(&[
        "scan",
        "--family",
        "w-s",
        "--grid",
        "0:1:3",
        "--preset",
        "ws-zx",
        "--optimize",
        "--restarts",
        "8",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = json(&out);
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert!(rows[0]["optimized_value"].as_f64().unwrap() >= 3.0 - 1e-9);
}

#[test]
fn interval_for_tilted_preset() {
    let (code, out, _) = run_args(&["interval", "--family", "ghz-w", "--preset", "ghzw-tilt"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["interval"]["lo"].as_f64().unwrap() - 0.011).abs() < 1e-3);
    assert!((v["interval"]["hi"].as_f64().unwrap() - 0.999).abs() < 1e-3);
}

#[test]
fn conjecture_is_deterministic() {
    let args = ["conjecture", "--samples", "100", "--seed", "7", "--restarts", "8"];
    let (code, first, _) = run_args(&args);
    assert_eq!(code, 0);
    let (_, second, _) = run_args(&args);
    assert_eq!(first, second);
    let v = json(&first);
    assert_eq!(v["samples"], 100);
    assert!(v["counterexamples"].as_array().unwrap().is_empty());
}

#[test]
fn verify_small_suite() {
    let (code, out, err) = run_args(&["verify", "--samples", "20", "--seed", "3", "--restarts", "8"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn input_errors_exit_1() {
    for args in [
        &["analyze", "--state", "gghz:phi=oops"][..],
        &["analyze", "--state", "ghz-w:p=1.5"],
        &["scan", "--family", "ghz-w", "--grid", "0:1:1"],
        &["scan", "--family", "ghz", "--grid", "0:1:5"],
        &["conjecture", "--samples", "10", "--mode", "uniform"],
        &["mermin", "--state", "ghz", "--preset", "nope"],
        &["analyze", "--state", "ghz", "--bogus"],
    ] {
        let (code, out, err) = run_args(args);
        assert_eq!(code, 1, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn reported_states_round_trip() {
    let config = OptimizationConfig {
        restarts: 8,
        ..Default::default()
    };
    let report = eb_bound_check(5, 4, &config).unwrap();
    let parsed: StateSpec = report.worst.state.parse().unwrap();
    let original = sample_indexed(SamplingMode::Haar, 4, report.worst.index as u64);
    assert!((parsed.state().unwrap().fidelity(&original) - 1.0).abs() < 1e-12);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mermin-coa");
    let ok = Command::new(bin)
        .args(["mermin", "--state", "ghz", "--preset", "ghz-xy"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"violated\": true"));
    let bad = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("Usage"));
}
