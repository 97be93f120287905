//! Exit codes, config validation and output files of the `formlab` binary.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn formlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn run(dir: &TempDir, body: &str) -> Output {
    let config = write_config(dir.path(), "config.json", body);
    let out = dir.path().join("out");
    formlab(&["run", &config, "--out", out.to_str().unwrap()])
}

#[test]
fn list_shows_the_catalog() {
    let out = formlab(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() >= 10, "{text}");
    assert!(lines.iter().any(|l| l.starts_with("counterexample_2x2\t")));
    let dtn = lines.iter().find(|l| l.starts_with("dtn_trace_convergence\t")).unwrap();
    assert!(dtn.contains("Dirichlet-to-Neumann") && dtn.contains("theorem"), "{dtn}");
}

#[test]
fn unknown_top_level_key_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = run(&dir, "{\n  \"experiment\": \"robin_to_neumann\",\n  \"foo\": 1\n}\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("foo") && err.contains("line 3"), "{err}");
}

#[test]
fn unknown_parameter_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = run(
        &dir,
        "{\n  \"experiment\": \"robin_to_neumann\",\n  \"parameters\": {\n    \"foo\": 2\n  }\n}\n",
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("`foo`") && err.contains("line 4") && err.contains("accepted: k"),
        "{err}"
    );
}

#[test]
fn malformed_json_and_unknown_experiment_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = run(&dir, "{\n  \"experiment\": \"robin_to_neumann\",\n  \"mesh\": \n}");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 4"));
    let out = run(&dir, r#"{"experiment": "nope"}"#);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("nope"));
}

#[test]
fn mesh_is_rejected_where_unused() {
    let dir = TempDir::new().unwrap();
    let out = run(&dir, r#"{"experiment": "counterexample_2x2", "mesh": 8}"#);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("mesh"));
}

#[test]
fn wentzell_sigma_zero_reports_non_convergence() {
    let dir = TempDir::new().unwrap();
    let out = run(&dir, r#"{"experiment": "wentzell_sigma_zero"}"#);
    assert_eq!(out.status.code(), Some(2));
    let csv = std::fs::read_to_string(dir.path().join("out/wentzell_sigma_zero.csv")).unwrap();
    assert!(csv.lines().any(|l| l.contains(",NON-CONVERGENCE,")));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let body = r#"{"experiment": "dtn_trace_convergence", "parameters": {"n": [2, 4, 8, 16]}}"#;
    let config = write_config(dir.path(), "c.json", body);
    let mut files = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = formlab(&["run", &config, "--out", out.to_str().unwrap()]).status;
        assert!(status.success());
        files.push(std::fs::read(out.join("dtn_trace_convergence.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert!(!files[0].contains(&b'\r'));
}

#[test]
fn robin_trace_norms_decrease() {
    let dir = TempDir::new().unwrap();
    let body = r#"{
  "experiment": "robin_to_neumann",
  "parameters": {"k": [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625]},
  "mesh": 128,
  "t_grid": [0.1]
}"#;
    let out = run(&dir, body);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("out/robin_to_neumann.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        ["experiment", "paper_anchor", "parameter", "t", "metric", "value"]
    );
    let values: Vec<f64> = reader
        .records()
        .map(Result::unwrap)
        .filter(|r| &r[4] == "trace_norm")
        .map(|r| r[5].parse().unwrap())
        .collect();
    assert_eq!(values.len(), 8);
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

#[test]
fn plots_come_from_the_csv() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "c.json",
        r#"{"experiment": "coupled_boundary", "emit_plots": true}"#,
    );
    let out = dir.path().join("out");
    assert!(formlab(&["run", &config, "--out", out.to_str().unwrap()])
        .status
        .success());
    let svg = std::fs::read_to_string(out.join("coupled_boundary.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("resolvent_difference") && svg.contains("<polyline"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "c.json",
        r#"{"experiment": "robin_to_neumann", "mesh": 32}"#,
    );
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(threads);
        let status = Command::new(env!("CARGO_BIN_EXE_formlab"))
            .env("FORMLAB_THREADS", threads)
            .args(["run", &config, "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        files.push(std::fs::read(out.join("robin_to_neumann.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let bad = Command::new(env!("CARGO_BIN_EXE_formlab"))
        .env("FORMLAB_THREADS", "zero")
        .arg("list")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
