//! End-to-end checks of the `geophase` binary: exit codes, file emission,
//! config handling, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

use geophase_cli::output::{parse_csv, CSV_HEADER};

fn geophase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geophase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn help_exits_zero() {
    let out = geophase(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("scan"));
}

#[test]
fn unknown_flag_exits_one() {
    let out = geophase(&["scan", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_config_exits_one() {
    let out = geophase(&["report", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("io failure"));
}

#[test]
fn unwritable_output_exits_one() {
    let out = geophase(&[
        "scan",
        "--alphas",
        "0.5",
        "--duration",
        "0.5",
        "--steps",
        "600",
        "--output",
        "/nonexistent-dir/rows.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn abelian_loop_gate_passes() {
    let out = geophase(&["abelian-loop", "--steps", "5000"]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn curvature_map_gate_passes_and_writes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let out = geophase(&[
        "curvature-map",
        "--grid",
        "40",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("theta,phi,f_norm\n"));
    assert_eq!(text.lines().count(), 1 + 40 * 40);
}

#[test]
fn spin_half_gate_passes_deterministically() {
    let a = geophase(&["spin-half", "--points", "25", "--seed", "9"]);
    let b = geophase(&["spin-half", "--points", "25", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0), "stdout: {}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn wilson_prints_the_transport() {
    let out = geophase(&["wilson", "--steps", "2000", "--duration", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("unitarity residual"));
    assert!(text.contains("ordering gap"));
}

#[test]
fn scan_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a_path = dir.path().join("a.csv");
    let b_path = dir.path().join("b.csv");
    let args = |path: &Path| {
        vec![
            "scan".to_string(),
            "--alphas".into(),
            "0.4,0.9".into(),
            "--duration".into(),
            "1.5".into(),
            "--steps".into(),
            "800".into(),
            "--seed".into(),
            "7".into(),
            "--output".into(),
            path.to_str().unwrap().to_string(),
        ]
    };
    let run_a = Command::new(env!("CARGO_BIN_EXE_geophase"))
        .args(args(&a_path))
        .output()
        .unwrap();
    let run_b = Command::new(env!("CARGO_BIN_EXE_geophase"))
        .args(args(&b_path))
        .output()
        .unwrap();
    assert_eq!(run_a.status.code(), Some(0));
    assert_eq!(run_b.status.code(), Some(0));
    let a = std::fs::read(&a_path).unwrap();
    let b = std::fs::read(&b_path).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "scan output differs between identical runs");

    let rows = parse_csv(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].alpha, 0.4);
    assert_eq!(rows[1].alpha, 0.9);
}

#[test]
fn scan_emits_the_exact_header() {
    let out = geophase(&[
        "scan", "--alphas", "0.5", "--duration", "0.8", "--steps", "600",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.starts_with(&format!("{CSV_HEADER}\n")),
        "unexpected scan stdout: {text}"
    );
    assert!(text.contains("attained max P_d"));
}

#[test]
fn scan_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let out = geophase(&[
        "scan",
        "--alphas",
        "0.6",
        "--duration",
        "0.8",
        "--steps",
        "600",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<geophase_cli::output::ScanRow> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].alpha, 0.6);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(
        &path,
        r#"{
  "params": {"delta": 1000.0, "omega": 1.0},
  "duration": 2.0,
  "wilson_steps": 900
}"#,
    )
    .unwrap();
    let out = geophase(&[
        "report",
        "--config",
        path.to_str().unwrap(),
        "--duration",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"wilson_steps": "not a number"}"#).unwrap();
    let out = geophase(&["report", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
}

#[test]
fn non_adiabatic_regime_fails_the_report_gate_with_exit_two() {
    // Delta/Omega = 2: the near-dark level accumulates ~7 rad of dynamical
    // phase, the degenerate-doublet picture breaks, and the two methods
    // disagree at the tens-of-percent level
    let out = geophase(&[
        "report", "--delta", "2", "--duration", "30", "--steps", "2000",
    ]);
    assert_eq!(out.status.code(), Some(2), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
    assert!(stdout(&out).contains("method disagreement"));
}

#[test]
fn compose_prints_both_methods() {
    let out = geophase(&[
        "compose", "--duration", "1.2", "--steps", "700",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("holonomy method"));
    assert!(text.contains("tdse method"));
    assert!(text.contains("P_d"));
}

#[test]
fn evolve_writes_a_run_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let out = geophase(&[
        "evolve",
        "--duration",
        "2.0",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(record.get("populations").is_some());
    assert!(record.get("norm_drift").is_some());
    assert!(record.get("leakage").is_some());
}
