use std::fs;
use std::process::{Command, Output};

use primecavity::experiments::read_scaling_csv;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primecavity")).args(args).output().expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn spectrum_csv_has_manifest_and_rows() {
    let out = run(&["spectrum", "--nmax", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# primecavity spectrum schema_version=1"));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "N,factors,energy,gap");
    assert_eq!(rows.len(), 13);
    assert!(rows[12].starts_with("12,2^2*3,"));
}

#[test]
fn spectrum_json_is_versioned() {
    let out = run(&["spectrum", "--nmax", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
}

#[test]
fn scaling_file_round_trips_and_writes_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scaling.csv");
    let out = run(&["scaling", "--target", "8,16,32", "--gnuplot-script", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# fit:")));
    let records = read_scaling_csv(text.as_bytes()).unwrap();
    assert_eq!(records.iter().map(|r| r.n).collect::<Vec<_>>(), vec![8, 16, 32]);
    assert!(fs::read_to_string(dir.path().join("scaling.gp")).unwrap().contains("scaling.csv"));
}

#[test]
fn prepare_passes_and_reports_json() {
    let out = run(&["prepare", "--target", "6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["readout"], "2*3");
    assert_eq!(v["results"]["outcome"], "pass");
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn prepare_without_excitations_is_inconclusive() {
    let out = run(&["prepare", "--target", "6", "--lambda", "1e-4", "--shots", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn configuration_errors_exit_with_four() {
    for args in [
        &["prepare", "--target", "6", "--lambda", "0.05"][..],
        &["prepare", "--target", "6", "--nmax", "8"],
        &["prepare", "--target", "6", "--coupling-model", "ring"],
        &["spectrum", "--nmax", "1"],
        &["scaling", "--gnuplot-script"],
        &["prepare", "--target", "6", "--bogus"],
    ] {
        assert_eq!(run(args).status.code(), Some(4), "{:?}", args);
    }
}

#[test]
fn quick_check_passes() {
    let out = run(&["check", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("[FAIL]"));
}
