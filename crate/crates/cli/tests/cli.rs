use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn herd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_herd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Star-like tree on six nodes with leader 1 and weights `a, b, c` on the
/// edges 1-3, 3-5 and 3-6.
fn example2_json(a: i64, b: i64, c: i64) -> String {
    let mut m = [[0i64; 6]; 6];
    for (u, v, w) in [(0, 1, 1), (0, 2, a), (0, 3, 2), (2, 4, b), (2, 5, c)] {
        m[u][v] = w;
        m[v][u] = w;
    }
    serde_json::json!({
        "n": 6,
        "A": m,
        "B": {"leaders": [1]},
        "metadata": {"name": "example2"}
    })
    .to_string()
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let dir = TempDir::new().unwrap();
    let herdable = write(&dir, "h.json", &example2_json(1, 1, 1));
    let out = herd(&["check", s(&herdable)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("herdable: yes"));

    let not_herdable = write(&dir, "n.json", &example2_json(1, 1, -1));
    let out = herd(&["check", s(&not_herdable)]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("dual certificate"));
}

#[test]
fn balance_on_positive_model_is_one_cluster() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"n":3,"A":[[0,1,0],[1,0,2],[0,2,0]],"B":{"leaders":[1]}}"#);
    let out = herd(&["balance", s(&model), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["details"]["clustering"]["clusters"], serde_json::json!([[1, 2, 3]]));
    assert_eq!(report["index_base"], 1);
}

#[test]
fn decimals_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"n":1,"A":[["0.5"]],"B":{"leaders":[1]}}"#);
    let out = herd(&["check", s(&model)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("A[0][0]"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&herd(&["frobnicate"])), 2);
    assert_eq!(code(&herd(&["check"])), 2);
    assert_eq!(code(&herd(&["check", "x.json", "--bogus"])), 2);
    assert_eq!(code(&herd(&["check", "/nonexistent/model.json"])), 2);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", &example2_json(-3, 2, 5));
    let mut bodies = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("r{k}.json"));
        let out = herd(&["criteria", s(&model), "--report", s(&path)]);
        assert_eq!(code(&out), 0, "{}", stdout(&out));
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        bodies.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn verify_report_accepts_genuine_and_rejects_tampered() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", &example2_json(1, 1, -1));
    let report = dir.path().join("r.json");
    assert_eq!(code(&herd(&["check", s(&model), "--report", s(&report)])), 3);
    let out = herd(&["verify-report", s(&report), "--model", s(&model)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    v["certificates"][0]["vector"][0] = Value::String("7".into());
    let tampered = write(&dir, "t.json", &v.to_string());
    let out = herd(&["verify-report", s(&tampered), "--model", s(&model)]);
    assert_eq!(code(&out), 4);
}

#[test]
fn synthesize_and_verify_plan() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", &example2_json(1, 1, 1));
    let x0 = write(&dir, "x0.json", r#"[-5, 3, "1/2", 0, -10, 7]"#);
    let report = dir.path().join("r.json");
    let out = herd(&["synthesize", s(&model), "--x0", s(&x0), "--h", "3/2", "--report", s(&report)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = herd(&["verify-report", s(&report), "--model", s(&model)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    let refused = write(&dir, "n.json", &example2_json(1, 1, -1));
    let out = herd(&["synthesize", s(&refused), "--x0", s(&x0), "--h", "1"]);
    assert_eq!(code(&out), 3);
    let out = herd(&["synthesize", s(&model), "--x0", s(&x0), "--h", "0.5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn tree_and_design_commands() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", &example2_json(1, 1, -1));
    let out = herd(&["tree", s(&model), "--leader", "1", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["herdable"], false);
    assert_eq!(report["details"]["layers"]["layers"], serde_json::json!([[2, 3, 4], [5, 6]]));
    assert_eq!(code(&herd(&["tree", s(&model), "--leader", "9"])), 2);

    let positive = write(&dir, "p.json", &example2_json(1, 1, 1));
    let out = herd(&["design", s(&positive), "--max-size", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["details"]["minimal_sets"][0]["leaders"], serde_json::json!([1]));
}

#[test]
fn fuzz_is_consistent() {
    let out = herd(&["fuzz", "--seed", "42", "--count", "20"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}
