//! End-to-end tests of the `condgate` binary: document round-trips, exit
//! codes, byte-level determinism, and the golden diagram.

use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condgate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condgate"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Circuit document for the balanced three-mode interferometer.
fn write_balanced_circuit(dir: &Path) -> PathBuf {
    let f = 1.0 / (2.0 * SQRT_2);
    let rows = [
        [f * (SQRT_2 + 1.0), f * (SQRT_2 - 1.0), f * SQRT_2],
        [f * (SQRT_2 - 1.0), f * (SQRT_2 + 1.0), -f * SQRT_2],
        [f * SQRT_2, -f * SQRT_2, -2.0 * f],
    ];
    let matrix: Vec<Vec<Value>> = rows
        .iter()
        .map(|row| row.iter().map(|&x| json!({"re": x, "im": 0.0})).collect())
        .collect();
    let doc = json!({
        "modes": 3,
        "signal_modes": 2,
        "elements": [{"type": "unitary", "matrix": matrix}],
    });
    write_file(dir, "balanced.json", &doc.to_string())
}

fn write_state_11(dir: &Path) -> PathBuf {
    let doc = json!({"amplitudes": [{"occ": [1, 1], "re": 1.0, "im": 0.0}]});
    write_file(dir, "state11.json", &doc.to_string())
}

#[test]
fn gate_on_identity_circuit_is_the_identity_operator() {
    let dir = TempDir::new().unwrap();
    let circuit = write_file(
        dir.path(),
        "identity.json",
        r#"{"modes": 2, "signal_modes": 1, "elements": []}"#,
    );
    let output = run(&["gate", circuit.to_str().unwrap(), "--nmax", "3"]);
    let doc = stdout_json(&output);
    assert_eq!(doc["sector_shift"], json!(0));
    assert_eq!(doc["basis"], json!([[0], [1], [2], [3]]));
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for (k, entry) in entries.iter().enumerate() {
        assert_eq!(entry["row"], json!(k));
        assert_eq!(entry["col"], json!(k));
        assert_eq!(entry["re"], json!(1.0));
        assert_eq!(entry["im"], json!(0.0));
    }
}

#[test]
fn apply_reports_five_sixteenths() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let state = write_state_11(dir.path());
    for method in ["qsymbol", "oracle"] {
        let output = run(&[
            "apply",
            circuit.to_str().unwrap(),
            "--state",
            state.to_str().unwrap(),
            "--prepare",
            "1",
            "--count",
            "1",
            "--nmax",
            "2",
            "--method",
            method,
        ]);
        let doc = stdout_json(&output);
        let p = doc["probability"].as_f64().unwrap();
        assert!((p - 0.3125).abs() <= 1e-12, "{method}: p = {p}");
        assert!(doc["normalized_state"]["amplitudes"].as_array().unwrap().len() == 3);
    }
}

#[test]
fn compile_round_trip_reproduces_gate_output() {
    let dir = TempDir::new().unwrap();
    let circuit = write_file(
        dir.path(),
        "mixed.json",
        r#"{"modes": 3, "signal_modes": 2, "elements": [
            {"type": "bs", "theta": 0.5, "modes": [0, 2]},
            {"type": "ps", "phi": 0.3, "mode": 1},
            {"type": "bs", "theta": -1.1, "modes": [1, 2]}
        ]}"#,
    );
    let compiled_path = dir.path().join("compiled.json");
    let compile = run(&[
        "compile",
        circuit.to_str().unwrap(),
        "--out",
        compiled_path.to_str().unwrap(),
    ]);
    assert!(compile.status.success());
    let compiled: Value =
        serde_json::from_str(&std::fs::read_to_string(&compiled_path).unwrap()).unwrap();
    assert_eq!(compiled["modes"], json!(3));
    assert_eq!(compiled["signal_modes"], json!(2));
    assert_eq!(compiled["elements"][0]["type"], json!("unitary"));

    let args = ["--prepare", "1", "--count", "1", "--nmax", "3"];
    let direct = run(&[&["gate", circuit.to_str().unwrap()], &args[..]].concat());
    let round_trip = run(&[&["gate", compiled_path.to_str().unwrap()], &args[..]].concat());
    assert!(direct.status.success() && round_trip.status.success());
    assert_eq!(direct.stdout, round_trip.stdout);
}

#[test]
fn diagram_matches_the_golden_file() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let output = run(&["diagram", circuit.to_str().unwrap()]);
    assert!(output.status.success());
    let golden = include_str!("golden/histories_50_50.dot");
    assert_eq!(String::from_utf8(output.stdout).unwrap(), golden);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let args = [
        "gate",
        circuit.to_str().unwrap(),
        "--prepare",
        "1",
        "--count",
        "1",
        "--nmax",
        "3",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(first.stdout.ends_with(b"\n"));
}

#[test]
fn apply_from_operator_file_matches_the_circuit_path() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let state = write_state_11(dir.path());
    let op_path = dir.path().join("op.json");
    let gate = run(&[
        "gate",
        circuit.to_str().unwrap(),
        "--prepare",
        "1",
        "--count",
        "1",
        "--nmax",
        "2",
        "--out",
        op_path.to_str().unwrap(),
    ]);
    assert!(gate.status.success());

    let from_circuit = run(&[
        "apply",
        circuit.to_str().unwrap(),
        "--state",
        state.to_str().unwrap(),
        "--prepare",
        "1",
        "--count",
        "1",
        "--nmax",
        "2",
    ]);
    let from_operator = run(&[
        "apply",
        "--operator",
        op_path.to_str().unwrap(),
        "--state",
        state.to_str().unwrap(),
    ]);
    assert!(from_circuit.status.success() && from_operator.status.success());
    assert_eq!(from_circuit.stdout, from_operator.stdout);
}

#[test]
fn check_reports_small_residuals() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let output = run(&[
        "check",
        circuit.to_str().unwrap(),
        "--prepare",
        "1",
        "--nmax",
        "3",
    ]);
    let doc = stdout_json(&output);
    assert!(doc["completeness_residual"].as_f64().unwrap() < 1e-9);
    assert!(doc["unitarity_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn distribution_probabilities_sum_to_one() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let state = write_state_11(dir.path());
    let output = run(&[
        "distribution",
        circuit.to_str().unwrap(),
        "--state",
        state.to_str().unwrap(),
        "--prepare",
        "1",
        "--nmax",
        "3",
    ]);
    let doc = stdout_json(&output);
    let outcomes = doc["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 4);
    assert_eq!(outcomes[1]["count"], json!([1]));
    assert!((outcomes[1]["probability"].as_f64().unwrap() - 0.3125).abs() < 1e-12);
    assert!((doc["total_probability"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn missing_file_exits_one_with_message() {
    let output = run(&["gate", "/nonexistent/circuit.json"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("cannot read"));
    assert!(output.stdout.is_empty());
}

#[test]
fn pattern_length_mismatch_exits_one_with_json_error() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let output = run(&[
        "gate",
        circuit.to_str().unwrap(),
        "--prepare",
        "1,1",
        "--json-errors",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(doc["error"]["kind"], json!("pattern_length"));
    assert!(doc["error"]["message"].as_str().unwrap().contains("length 2"));
}

#[test]
fn basis_cap_exits_two() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let output = run_with_env(
        &["gate", circuit.to_str().unwrap(), "--nmax", "6"],
        "CONDGATE_MAX_BASIS",
        "5",
    );
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("exceeds the cap"));
}

#[test]
fn malformed_circuit_exits_one() {
    let dir = TempDir::new().unwrap();
    let circuit = write_file(dir.path(), "broken.json", "{\"modes\": 3,\n  \"signal\"");
    let output = run(&["compile", circuit.to_str().unwrap(), "--json-errors"]);
    assert_eq!(output.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(doc["error"]["kind"], json!("syntax"));
}

#[test]
fn clap_level_failures_exit_one_and_help_exits_zero() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("condgate"));

    let version = run(&["--version"]);
    assert_eq!(version.status.code(), Some(0));

    let bad_method = run(&["gate", "whatever.json", "--method", "exact"]);
    assert_eq!(bad_method.status.code(), Some(1));

    let no_subcommand = run(&[]);
    assert_eq!(no_subcommand.status.code(), Some(1));

    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let state = write_state_11(dir.path());
    let both_sources = run(&[
        "apply",
        circuit.to_str().unwrap(),
        "--operator",
        "op.json",
        "--state",
        state.to_str().unwrap(),
    ]);
    assert_eq!(both_sources.status.code(), Some(1));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = TempDir::new().unwrap();
    let circuit = write_balanced_circuit(dir.path());
    let out_path = dir.path().join("result.json");
    let direct = run(&["check", circuit.to_str().unwrap(), "--nmax", "2"]);
    let to_file = run(&[
        "check",
        circuit.to_str().unwrap(),
        "--nmax",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(direct.status.success() && to_file.status.success());
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&out_path).unwrap(), direct.stdout);
}
