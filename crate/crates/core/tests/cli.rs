//! End-to-end checks against the built binary.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_transcend-ug");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn play_on_dual_baseline_takes_everything() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "base.toml",
        "[agent.allocator]\ngamma = 0.5\ndistance = 1.0\n\n[agent.recipient]\ngamma = 0.5\ndistance = 1.0\n",
    );
    let text = stdout(&run(&["play", "--config", &cfg]));
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        ["proposed_split", "accepted", "payoff_allocator", "payoff_recipient", "util_allocator", "util_recipient"]
    );
    assert_eq!(v["proposed_split"].as_f64(), Some(1.0));
    assert_eq!(v["accepted"], serde_json::Value::Bool(true));
    assert!(text.contains(r#""util_allocator":0.666667"#), "{text}");
}

#[test]
fn tau_curves_contains_spot_row() {
    let text = stdout(&run(&["tau-curves", "--gamma", "0.5", "--d-max", "2"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,d,tau"));
    assert!(text.lines().any(|l| l == "0.500000,1.000000,0.500000"), "{text}");
}

#[test]
fn sweep_headers_are_exact() {
    for (cmd, header) in [
        ("utility-curves", "curve_param,curve_value,split,utility,is_best_split,is_min_acceptable"),
        ("acceptance-matrix", "d,split,accepted"),
        ("tau-curves", "gamma,d,tau"),
        ("game-grid", "axis1,axis2,proposed_split,accepted"),
    ] {
        let text = stdout(&run(&[cmd]));
        assert_eq!(text.lines().next(), Some(header), "{cmd}");
    }
}

#[test]
fn json_mode_mirrors_csv_rows() {
    let csv = stdout(&run(&["acceptance-matrix", "--d-max", "0.4"]));
    let json = stdout(&run(&["acceptance-matrix", "--d-max", "0.4", "--format", "json"]));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    assert_eq!(rows[0]["d"].as_f64(), Some(0.0));
    assert!(rows[0]["accepted"].is_boolean());
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = run(&["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn config_errors_exit_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[payoff]\nlambda = 0.5\n");
    let out = run(&["play", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("payoff.lambda must be > 1"));

    let typo = write(dir.path(), "typo.toml", "[game]\ngrid_stp = 0.1\n");
    let out = run(&["play", "--config", &typo]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = run(&["play", "--config", "/nonexistent/x.toml"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["play", "--allocator-gamma", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("agent.allocator.gamma"));
}

#[test]
fn unwritable_output_is_runtime_error() {
    let out = run(&["tau-curves", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[agent.recipient]\ngamma = 0.2\ndistance = 3.0\n[payoff]\nk = 4.0\n",
    );
    let printed = stdout(&run(&["play", "--config", &cfg, "--recipient-d", "0.5", "--print-config"]));
    let v: toml::Value = toml::from_str(&printed).unwrap();
    assert_eq!(v["agent"]["recipient"]["distance"].as_float(), Some(0.5));
    assert_eq!(v["agent"]["recipient"]["gamma"].as_float(), Some(0.2));
    assert_eq!(v["payoff"]["k"].as_float(), Some(4.0));
    assert_eq!(v["game"]["grid_step"].as_float(), Some(0.01));
}

#[test]
fn print_config_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = stdout(&run(&["game-grid", "--recipient-mode", "association", "--k", "10", "--print-config"]));
    let path = write(dir.path(), "dump.toml", &first);
    let second = stdout(&run(&["game-grid", "--config", &path, "--print-config"]));
    assert_eq!(first, second);
    let a = stdout(&run(&["game-grid", "--recipient-mode", "association", "--k", "10"]));
    let b = stdout(&run(&["game-grid", "--config", &path]));
    assert_eq!(a, b);
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tau.csv");
    let out = run(&["tau-curves", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("gamma,d,tau\n"));
}

#[test]
fn forced_offer_is_snapped() {
    let text = stdout(&run(&["play", "--offer", "0.333", "--format", "csv"]));
    assert_eq!(text.lines().nth(1).unwrap().split(',').next(), Some("0.670000"));
}
