use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn ctsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctsynth")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn quad(a: i64, c: i64, kappa: u32) -> Value {
    json!({"a": a, "b": 0, "c": c, "d": 0, "kappa": kappa})
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// T = diag(1, ω) with ω = (1 + i)/√2.
fn t_gate_file() -> Value {
    json!({"qubits": 1, "format": "ring", "entries": [quad(1, 0, 0), quad(0, 0, 0), quad(0, 0, 0), quad(1, 1, 1)]})
}

#[test]
fn exact_t_gate() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "t.json", &t_gate_file().to_string());
    let qasm = dir.path().join("t.qasm");
    let out = ctsynth(&["exact", s(&m), "--out", s(&qasm)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["exact_equality"], true);
    assert_eq!(report["reflection_count"], 2);
    let text = std::fs::read_to_string(&qasm).unwrap();
    assert!(text.contains("OPENQASM 2.0;"));
    assert!(text.contains("// role: q[0] flag"));
}

#[test]
fn exact_identity_uses_two_reflections() {
    let dir = TempDir::new().unwrap();
    let file = json!({"qubits": 1, "format": "ring", "entries": [quad(1, 0, 0), quad(0, 0, 0), quad(0, 0, 0), quad(1, 0, 0)]});
    let m = write(&dir, "id.json", &file.to_string());
    let out = ctsynth(&["exact", s(&m), "--out", s(&dir.path().join("id.qasm"))]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["reflection_count"], 2);
}

#[test]
fn exact_without_out_prints_qasm() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "t.json", &t_gate_file().to_string());
    let out = ctsynth(&["exact", s(&m)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("OPENQASM 2.0;"));
    let report: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["mode"], "exact");
}

#[test]
fn exact_rejects_shear_and_bad_files() {
    let dir = TempDir::new().unwrap();
    let shear = json!({"qubits": 1, "format": "ring", "entries": [quad(1, 0, 0), quad(1, 0, 0), quad(0, 0, 0), quad(1, 0, 0)]});
    let m = write(&dir, "shear.json", &shear.to_string());
    assert_eq!(ctsynth(&["exact", s(&m)]).status.code(), Some(2));
    let m = write(&dir, "bad.json", "{\"qubits\": 1, ");
    assert_eq!(ctsynth(&["exact", s(&m)]).status.code(), Some(3));
    let short = json!({"qubits": 1, "format": "ring", "entries": [quad(1, 0, 0)]});
    let m = write(&dir, "short.json", &short.to_string());
    assert_eq!(ctsynth(&["exact", s(&m)]).status.code(), Some(3));
    let wrong = json!({"qubits": 1, "format": "float", "entries": [quad(1, 0, 0), quad(0, 0, 0), quad(0, 0, 0), quad(1, 0, 0)]});
    let m = write(&dir, "wrong.json", &wrong.to_string());
    assert_eq!(ctsynth(&["exact", s(&m)]).status.code(), Some(3));
}

fn rotation_file(theta: f64, defect: f64) -> Value {
    let (c, s) = (theta.cos(), theta.sin());
    let e = |re: f64| json!({"re": re, "im": 0.0});
    json!({"qubits": 1, "format": "float", "entries": [e(c + defect), e(-s), e(s), e(c)]})
}

#[test]
fn approx_rotation_is_certified_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "rot.json", &rotation_file(0.3, 0.0).to_string());
    let (a, b) = (dir.path().join("a.qasm"), dir.path().join("b.qasm"));
    let out = ctsynth(&["approx", s(&m), "--eps", "0.01", "--seed", "3", "--out", s(&a)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert!(report["distance"].as_f64().unwrap() <= 0.01);
    assert!(report["m"].as_u64().is_some());
    assert!(report["stats"]["t_count"].as_u64().unwrap() > 0);
    let again = ctsynth(&["approx", s(&m), "--eps", "0.01", "--seed", "3", "--out", s(&b)]);
    assert_eq!(out.stdout, again.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn approx_errors() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "rot.json", &rotation_file(0.3, 0.0).to_string());
    assert_eq!(ctsynth(&["approx", s(&m), "--eps", "2"]).status.code(), Some(4));
    assert_eq!(ctsynth(&["approx", s(&m), "--eps", "0"]).status.code(), Some(4));
    let m = write(&dir, "near.json", &rotation_file(0.3, 1e-3).to_string());
    assert_eq!(ctsynth(&["approx", s(&m), "--eps", "0.1"]).status.code(), Some(2));
}

const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

#[test]
fn simulate_hadamard_and_t8() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.qasm", &format!("{HEADER}qreg q[1];\nh q[0];\n"));
    let out = ctsynth(&["simulate", s(&h)]);
    assert!(out.status.success());
    let m = stdout_json(&out);
    assert_eq!(m["format"], "ring");
    assert_eq!(m["entries"][0], quad(1, 0, 1));
    assert_eq!(m["entries"][3], quad(-1, 0, 1));

    let t8 = write(&dir, "t8.qasm", &format!("{HEADER}qreg q[1];\n{}", "t q[0];\n".repeat(8)));
    let m = stdout_json(&ctsynth(&["simulate", s(&t8)]));
    assert_eq!(m["entries"], json!([quad(1, 0, 0), quad(0, 0, 0), quad(0, 0, 0), quad(1, 0, 0)]));
}

#[test]
fn simulate_output_feeds_exact() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.qasm", &format!("{HEADER}qreg q[2];\nh q[0];\ncx q[0],q[1];\nt q[1];\n"));
    let out = ctsynth(&["simulate", s(&c)]);
    let m = write(&dir, "m.json", &String::from_utf8(out.stdout).unwrap());
    let out = ctsynth(&["exact", s(&m), "--out", s(&dir.path().join("o.qasm"))]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["exact_equality"], true);
}

#[test]
fn simulate_errors() {
    let dir = TempDir::new().unwrap();
    let wide = write(&dir, "wide.qasm", &format!("{HEADER}qreg q[9];\nh q[8];\n"));
    assert_eq!(ctsynth(&["simulate", s(&wide)]).status.code(), Some(5));
    assert!(ctsynth(&["simulate", s(&wide), "--width-cap", "9"]).status.success());
    let bad = write(&dir, "bad.qasm", &format!("{HEADER}qreg q[1];\nh q[0]\n"));
    let out = ctsynth(&["simulate", s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn stats_of_empty_circuit() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.qasm", &format!("{HEADER}qreg q[2];\n"));
    let out = ctsynth(&["stats", s(&e)]);
    assert!(out.status.success());
    let st = stdout_json(&out);
    assert_eq!(st["total"], 0);
    assert_eq!(st["t_count"], 0);
    assert_eq!(st["width"], 2);
    let bad = write(&dir, "bad.qasm", "qreg q[");
    assert_eq!(ctsynth(&["stats", s(&bad)]).status.code(), Some(3));
}

#[test]
fn foursquare_outputs_verified_quadruples() {
    for (n, expected) in [("7", json!([2, 1, 1, 1])), ("0", json!([0, 0, 0, 0]))] {
        let out = ctsynth(&["foursquare", n]);
        assert!(out.status.success());
        assert_eq!(stdout_json(&out)["squares"], expected);
    }
    let big = "340282366920938463463374607431768211455";
    let out = ctsynth(&["foursquare", big, "--seed", "5"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let sum: num_bigint::BigUint = v["squares"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.to_string().parse::<num_bigint::BigUint>().unwrap().pow(2))
        .sum();
    assert_eq!(sum.to_string(), big);
    assert_eq!(ctsynth(&["foursquare", "-3"]).status.code().map(|c| c != 0), Some(true));
}
