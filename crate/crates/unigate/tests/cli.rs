use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use unigate_core::experiment::seeded_gate_set;
use unigate_core::{compile_brute, Unitary, VariantMode};

fn unigate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unigate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_vec(value).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn compile_matches_exhaustive_search() {
    let out = unigate(&[
        "compile",
        "--target",
        "cnot",
        "--mode",
        "four",
        "--half-depth",
        "3",
        "--seed",
        "4",
    ]);
    let v = stdout_json(&out);
    let gs = seeded_gate_set(4, VariantMode::Four).unwrap();
    let brute = compile_brute(&gs, &Unitary::cnot(), 6).unwrap();
    assert_eq!(v["word"], brute.word.to_digits());
    assert!((v["infidelity"].as_f64().unwrap() - brute.infidelity).abs() < 1e-12);
    assert_eq!(v["depth"], 6);
    assert_eq!(v["index_mode"], "exact");
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 16);
}

#[test]
fn half_depth_zero_compiles_to_the_empty_word() {
    let v = stdout_json(&unigate(&["compile", "--target", "identity", "--half-depth", "0"]));
    assert_eq!(v["depth"], 0);
    assert!(v["infidelity"].as_f64().unwrap().abs() < 1e-15);
}

#[test]
fn target_from_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rows = json!([
        [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [h, 0.0], [h, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [h, 0.0], [-h, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
    ]);
    let path = write_config(dir.path(), "target.json", &rows);
    let v = stdout_json(&unigate(&["compile", "--target", &path, "--half-depth", "1"]));
    assert_eq!(v["depth"], 2);
}

#[test]
fn exit_codes() {
    let bad_mode = unigate(&["compile", "--mode", "three", "--half-depth", "1"]);
    assert_eq!(bad_mode.status.code(), Some(2));
    let budget = unigate(&["compile", "--half-depth", "6", "--budget-bytes", "1000"]);
    assert_eq!(budget.status.code(), Some(3));
    let missing = unigate(&["compile", "--target", "/no/such/file.json", "--half-depth", "1"]);
    assert_ne!(missing.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        &json!({"version": 1, "mode": "four", "seeds": [0], "depths": [3], "output": "x.csv"}),
    );
    assert_eq!(unigate(&["scaling", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "unknown.json", &json!({"version": 1, "colour": "red"}));
    assert_eq!(unigate(&["qec", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn verify_prints_one_pass_line_per_check() {
    let out = unigate(&["qec", "--verify"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 32);
    assert!(lines.iter().all(|l| l.starts_with("PASS ")));
}

#[test]
fn scaling_writes_rows_and_refuses_single_depth_fit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scaling.csv");
    let cfg = write_config(
        dir.path(),
        "scaling.json",
        &json!({"version": 1, "mode": "two", "seeds": [0, 1, 2], "depths": [4], "output": csv}),
    );
    let v = stdout_json(&unigate(&["scaling", "--config", &cfg]));
    assert!(v["infidelity_fit"].is_null());
    assert!(v["warning"].as_str().unwrap().contains("fit refused"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# unigate "));
    assert!(lines.next().unwrap().starts_with("seed,mode,total_depth"));
    assert_eq!(lines.count(), 3);
    assert!(csv.with_extension("json").exists());
}

#[test]
fn scaling_fit_with_several_depths() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let cfg = write_config(
        dir.path(),
        "s.json",
        &json!({"version": 1, "mode": "four", "seeds": [0, 1, 2], "depths": [2, 4, 6], "output": csv}),
    );
    let v = stdout_json(&unigate(&["scaling", "--config", &cfg]));
    assert!(v["infidelity_fit"]["slope"].as_f64().unwrap() > 0.0);
    assert_eq!(v["rows"], 9);
}

#[test]
fn qec_sweep_rows_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("qec.csv");
    let cfg = write_config(
        dir.path(),
        "qec.json",
        &json!({
            "version": 1,
            "protocols": ["no_qec", "encode_only"],
            "epsilons": [1e-3, 1e-2],
            "samples_per_point": 5,
            "seed": 3,
            "output": csv
        }),
    );
    let v = stdout_json(&unigate(&["qec", "--config", &cfg]));
    assert_eq!(v["rows"], 20);
    let text = std::fs::read_to_string(&csv).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        format!(
            "# unigate {} config={}",
            env!("CARGO_PKG_VERSION"),
            v["config_hash"].as_str().unwrap()
        )
    );
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "protocol,epsilon,logical_error_probability,seed"
    );
    assert_eq!(text.lines().count(), 22);
    let again = stdout_json(&unigate(&["qec", "--config", &cfg]));
    assert_eq!(again["config_hash"], v["config_hash"]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), text);
}

#[test]
fn mesh_reports_each_half_depth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "mesh.json",
        &json!({
            "version": 1,
            "mode": "four",
            "gate_set_seed": 2,
            "half_depths": [1, 2],
            "n_targets": 4,
            "output": dir.path().join("mesh.csv")
        }),
    );
    let v = stdout_json(&unigate(&["mesh", "--config", &cfg]));
    assert_eq!(v["mesh"].as_array().unwrap().len(), 2);
}
