//! End-to-end checks of the `pdcons` binary: exit codes, override echo,
//! and output determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pdcons")
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pdcons_cli_{tag}_{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn unknown_subcommand_exits_with_usage_code() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_with_usage_code() {
    let out = run(&["certify", "--config", "x.json", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_2_and_names_the_path() {
    let out = run(&["certify", "--config", "/no/such/config.json"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("/no/such/config.json"), "stderr: {stderr}");
}

#[test]
fn kind_subcommand_mismatch_is_a_config_error() {
    let cfg = repo_config("certify.json");
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bundled_certify_config_passes_with_exit_zero() {
    let dir = tmp_dir("certify");
    let cfg = repo_config("certify.json");
    let out = run(&[
        "certify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.join("certify_report.txt")).unwrap();
    assert!(report.contains("overall: PASS"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn certify_refuses_oversized_alpha_before_running() {
    let dir = tmp_dir("certify_bad");
    let cfg = repo_config("certify.json");
    let out = run(&[
        "certify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--set",
        r#"algorithms.0.alpha={"mode":"manual","value":0.4}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("stepsize violation"), "stderr: {stderr}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn set_override_is_echoed_in_resolved_config() {
    let dir = tmp_dir("echo");
    let cfg = repo_config("certify.json");
    let out = run(&[
        "certify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--quiet",
        "--set",
        "stopping.epsilon=0.001",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let echoed = fs::read_to_string(dir.join("config_resolved.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&echoed).unwrap();
    assert_eq!(json["stopping"]["epsilon"], serde_json::json!(0.001));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn seed_flag_overrides_the_seed_range_start() {
    let dir = tmp_dir("seedflag");
    let cfg = repo_config("single_run.json");
    let out = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--quiet",
        "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("run_results.csv")).unwrap();
    assert!(csv.contains("_s00042_"), "csv: {csv}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn repeated_sweeps_have_byte_identical_bodies() {
    // Small sweep run twice: everything after the timestamp line must match.
    let dir_a = tmp_dir("det_a");
    let dir_b = tmp_dir("det_b");
    let cfg = repo_config("sweep.json");
    let common = [
        "--set",
        "graph.n=[5]",
        "--set",
        "graph.seeds.count=3",
        "--set",
        "stopping.max_iters=200000",
        "--quiet",
    ];
    for dir in [&dir_a, &dir_b] {
        let mut args = vec!["sweep", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()];
        args.extend_from_slice(&common);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["sweep_runs.csv", "sweep_averages.csv"] {
        let a = fs::read_to_string(dir_a.join(file)).unwrap();
        let b = fs::read_to_string(dir_b.join(file)).unwrap();
        let body = |s: &str| s.split_once('\n').map(|(_, rest)| rest.to_string()).unwrap();
        assert_eq!(body(&a), body(&b), "{file} bodies differ");
    }
    fs::remove_dir_all(&dir_a).ok();
    fs::remove_dir_all(&dir_b).ok();
}

#[test]
fn run_subcommand_emits_records_and_series() {
    let dir = tmp_dir("single");
    let cfg = repo_config("single_run.json");
    let out = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let results = fs::read_to_string(dir.join("run_results.csv")).unwrap();
    assert!(results.lines().nth(1).unwrap().starts_with("run_id,"));
    // pd T1, pd T4, mm, dgd: four records.
    assert_eq!(results.lines().count(), 2 + 4);
    let series = fs::read_to_string(dir.join("run_series.csv")).unwrap();
    assert!(series.lines().nth(1).unwrap().starts_with("algorithm,"));
    fs::remove_dir_all(&dir).ok();
}
