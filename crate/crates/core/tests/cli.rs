use std::path::Path;
use std::process::{Command, Output};

use hyperell::cli::exit_code;
use hyperell::Error;

fn hyperell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperell"))
        .args(args)
        .env_remove("HYPERELL_THREADS")
        .output()
        .unwrap()
}

fn workspace_root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().parent().unwrap()
}

#[test]
fn lpoly_reports_zeros() {
    let out = hyperell(&["lpoly", "--q", "3", "x^5+2x+1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fe_symmetry"], "exact");
    assert_eq!(v["theta"].as_array().unwrap().len(), 4);
    assert_eq!(v["c"][0], 1);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(hyperell(&["lpoly", "--q", "3", "x^2"]).status.code(), Some(2));
    assert_eq!(hyperell(&["lpoly", "--q", "4", "x^3+1"]).status.code(), Some(2));
    assert_eq!(hyperell(&["lpoly", "--q", "3", "x^3+"]).status.code(), Some(2));
    assert_eq!(hyperell(&["scan", "--d", "6"]).status.code(), Some(2));
    assert_eq!(hyperell(&["scan", "--target", "s:99"]).status.code(), Some(2));
    assert_eq!(hyperell(&["frobnicate"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_hyperell"))
        .args(["lpoly", "--q", "3", "x^3+x+1"])
        .env("HYPERELL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn error_classes_map_to_exit_codes() {
    assert_eq!(exit_code(&Error::Parse("x".into())), 2);
    assert_eq!(exit_code(&Error::InternalConsistency("x".into())), 3);
    assert_eq!(exit_code(&Error::Solver("x".into())), 3);
    assert_eq!(exit_code(&Error::Certification { theta: 0.1, violation: 1e-3 }), 5);
}

#[test]
fn scan_writes_162_rows_per_target_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h5.csv");
    let out = hyperell(&[
        "scan", "--q", "3", "--d", "5", "--target", "s:1", "--degree-policy", "formula",
        "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    // one upper and one lower row per D in each of the two modes
    assert_eq!(rows.len(), 162 * 2 * 2);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("h5.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["polys"], 162);
    assert_eq!(manifest["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn shipped_config_exits_zero_and_is_deterministic() {
    let config = workspace_root().join("configs/default.conf");
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let out = hyperell(&["scan", "--config", config.to_str().unwrap(), "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        bytes.push(std::fs::read(path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn extremal_reports_oracle() {
    let out = hyperell(&["extremal", "--target", "bernoulli:1", "--side", "minorant", "-N", "8"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let oracle = v["oracle_mean"].as_f64().unwrap();
    assert!((oracle + 1.0 / (12.0 * 81.0)).abs() < 1e-15);
    assert!(v["relative_gap"].as_f64().unwrap().abs() < 5e-3);

    let out = hyperell(&["extremal", "--target", "interval:0.2:0.7", "-N", "4"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["gap"].as_f64().unwrap() - 0.2).abs() < 1e-3);
}

#[test]
fn constants_table_flags() {
    let out = hyperell(&["constants", "--nmax", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1].contains("exact_match"));
    assert!(lines[2].contains("A<C") && lines[2].contains("in_bracket"));
}
