use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracmin")).args(args).env_remove("FRACMIN_THREADS").output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn problem_file(dir: &Path) -> String {
    let path = dir.join("problem.json");
    std::fs::write(
        &path,
        r#"{"grid": {"origin": [-1.0, -1.0], "h": 0.125, "nx": 16, "ny": 16},
            "omega": {"shape": "disk", "center": [0.0, 0.0], "radius": 1.0},
            "exterior": {"kind": "halfplane", "angle": 1.5707963267948966, "offset": 0.0},
            "r_ext": 2.0}"#,
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(fracmin(&["perimeter", "square", "--bogus"]).status.code(), Some(1));
    assert_eq!(fracmin(&["experiment", "nope"]).status.code(), Some(1));
    assert_eq!(fracmin(&["perimeter", "square", "--s", "0.7"]).status.code(), Some(1));
    assert_eq!(fracmin(&["curvature", "square", "--point", "1"]).status.code(), Some(1));
    assert_eq!(fracmin(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_config_keys_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"s": 0.2, "sigma": 1}"#).unwrap();
    let out = fracmin(&["perimeter", "square", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"s": 0.1, "h": 0.125}"#).unwrap();
    let doc = json(&fracmin(&["perimeter", "square", "--config", path.to_str().unwrap(), "--s", "0.3"]));
    assert_eq!(doc["config"]["s"], 0.3);
    assert_eq!(doc["config"]["h"], 0.125);
    assert_eq!(doc["result"]["h"], 0.125);
}

#[test]
fn square_perimeter_formulas_agree() {
    let doc = json(&fracmin(&["perimeter", "square", "--s", "0.25"]));
    assert!(doc["result"]["relative_gap"].as_f64().unwrap() < 1e-6);
}

#[test]
fn ring_cap_with_a_thin_ring_stays_empty() {
    let doc = json(&fracmin(&["experiment", "ring", "--delta", "0.01", "--s", "0.25", "--grid", "64"]));
    assert_eq!(doc["result"]["measurement"]["occupied_free_cells"], 0);
}

#[test]
fn sweep_to_half_approaches_the_classical_perimeter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let doc = json(&fracmin(&["sweep", "half", "--shape", "square", "--out", out]));
    let v = doc["result"]["extrapolated"].as_f64().unwrap();
    assert!((v - 8.0).abs() < 0.03 * 8.0, "{v}");
    let csv = std::fs::read_to_string(dir.path().join("sweep_half.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# fracmin "));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep_half.json")).unwrap()).unwrap();
    assert_eq!(saved["result"], doc["result"]);
}

#[test]
fn minimize_writes_json_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let input = problem_file(dir.path());
    let out = dir.path().join("out");
    let doc = json(&fracmin(&["minimize", "--input", &input, "--out", out.to_str().unwrap()]));
    let r = &doc["result"];
    assert_eq!(r["free_cells"], 208);
    // The halfplane datum fills the lower half of the disk.
    assert_eq!(r["occupied_free_cells"], 104);
    let pgm = std::fs::read_to_string(out.join("minimize.pgm")).unwrap();
    assert!(pgm.starts_with("P2"));
    assert!(pgm.contains("# config: {"));
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = problem_file(dir.path());
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_fracmin"))
            .args(["minimize", "--input", &input])
            .env("FRACMIN_THREADS", threads)
            .output()
            .unwrap();
        json(&out)
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one["config"]["threads"], 1);
    assert_eq!(four["config"]["threads"], 4);
    assert_eq!(one["result"].to_string(), four["result"].to_string());
}

#[test]
fn bad_thread_env_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_fracmin"))
        .args(["perimeter", "square"])
        .env("FRACMIN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(fracmin(&["verify", "--criterion", "3"]).status.code(), Some(0));
    assert_eq!(fracmin(&["verify", "--criterion", "7"]).status.code(), Some(2));
}

#[test]
fn core_suite_passes() {
    let out = fracmin(&["verify", "--suite", "core"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
