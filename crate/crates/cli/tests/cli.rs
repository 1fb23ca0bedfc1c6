use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_f2lab"));
    c.env_remove("F2LAB_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn schema() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema/v1.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft202012)
        .compile(&v)
        .expect("schema compiles")
}

fn assert_valid(doc: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violation: {msgs:?}\n{doc:#}");
}

/// Runs a command that must succeed and returns its JSON after schema validation.
fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_valid(&v);
    v
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bias_of_a_cubic() {
    let v = json(&["bias", "--poly", "x1*x2+x3*x4*x5"]);
    assert_eq!(v["pr_one"], "5/16");
    assert_eq!(v["signed_bias"], "3/8");
    assert_eq!(v["gap"], "1/48");
    assert_eq!(v["decimals"]["pr_one"], "0.312500000000");
}

#[test]
fn psi_example() {
    let v = json(&["psi", "--d", "2", "--f", "mul:2", "--vec", "0,2"]);
    assert_eq!(v["psi"], 14);
    assert_eq!(v["complete"], true);
    let v = json(&["psi", "--d", "2", "--f", "id", "--star", "1"]);
    assert!(v["psi"].as_u64().unwrap() >= 1);
}

#[test]
fn eval_point_and_table() {
    let v = json(&["eval", "--poly", "x1*x2 + x3", "--x", "110"]);
    assert_eq!(v["value"], 1);
    let v = json(&["eval", "--poly", "x1*x2", "--all"]);
    assert_eq!(v["table"], "0001");
    assert_eq!(v["weight"], 1);
}

#[test]
fn spectrum_and_dickson() {
    let v = json(&["spectrum", "--poly", "x1*x2"]);
    assert_eq!(v["support_size"], 4);
    assert_eq!(v["parseval"], "1/1");
    let v = json(&["dickson", "--poly", "x1*x2 + x3*x4"]);
    assert_eq!(v["rank1"], 4);
    assert_eq!(v["bias"], "1/4");
    assert_eq!(v["pairs"].as_array().unwrap().len(), 2);
}

#[test]
fn tv_and_joint() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "p.txt", "# a pair\nx1\nx2\n");
    let v = json(&["tv", "--polys", s(&f), "--rho", "1/2"]);
    assert_eq!(v["tv"], "0/1");
    let v = json(&["tv", "--polys", s(&f), "--rho", "1/3"]);
    // |1/4 - 4/9| + 2|1/4 - 2/9| + |1/4 - 1/9|, halved
    assert_eq!(v["tv"], "7/36");
    assert_eq!(v["decimal"], "0.194444444444");
    let v = json(&["joint", "--polys", s(&f)]);
    assert_eq!(v["product"], true);
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 4);
    let out = run(&["joint", "--polys", s(&f), "--format", "csv"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "outcome,count\n00,1\n10,1\n01,1\n11,1\n"
    );
}

#[test]
fn rank_regularize_and_rank21() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "f.txt", "x1*x2 + x3*x4\nx1*x2 + x3*x4 + x5*x6\n");
    let v = json(&["rank", "--polys", s(&f), "--r", "3"]);
    assert_eq!(v["min_combination"]["rank"], 2);
    assert_eq!(v["certificate"]["regular"], false);
    assert_eq!(v["certificate"]["combination"], "x5*x6");
    let v = json(&["regularize", "--factor", s(&f), "--f", "mul:2"]);
    assert_eq!(v["reconstruction_verified"], true);
    assert!(!v["steps"].as_array().unwrap().is_empty());

    let qs = write(&dir, "qs.txt", "x1*x2 + x3*x4\n");
    let ls = write(&dir, "ls.txt", "x1\nx3\n");
    let v = json(&[
        "rank21",
        "--qs",
        s(&qs),
        "--ls",
        s(&ls),
        "--gamma",
        "01101001",
        "--c",
        "2",
    ]);
    assert_eq!(v["verified"], true);
}

#[test]
fn sunflower_of_coordinate_lines() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        &dir,
        "s.json",
        r#"[{"m":4,"basis":["1000"]},{"m":4,"basis":["0100"]},{"m":4,"basis":["0010"]}]"#,
    );
    let v = json(&["sunflower", "--in", s(&f), "--size", "3"]);
    assert_eq!(v["found"], true);
    assert_eq!(v["validated"], true);
    assert_eq!(v["core"]["basis"].as_array().unwrap().len(), 0);
}

#[test]
fn audits() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "f.txt", "x1*x2 + x3*x4\nx5*x6 + x7*x8\n");
    let v = json(&["audit", "chebyshev", "--polys", s(&f)]);
    assert_eq!(v["max_covariance"], "0/1");
    assert_eq!(v["covariances_hold"], true);
    let petals = write(&dir, "petals.txt", "x1*x2 ; x3*x4\nx5*x6;x7*x8\n");
    let w = json(&["audit", "chebyshev", "--polys", s(&f), "--petals", s(&petals)]);
    assert_eq!(w["determined"], serde_json::json!([true, true]));
    let v = json(&["audit", "vazirani", "--polys", s(&f)]);
    assert_eq!(v["holds"], true);
    let v = json(&["audit", "density", "--factor", s(&f), "--eta", "1"]);
    assert_eq!(v["within_budget"], true);
}

#[test]
fn scan_and_certify() {
    let v = json(&["scan", "--degree", "2", "--vars", "4"]);
    assert_eq!(v["min_gap"], "1/24");
    assert_eq!(v["polys"], 2048);
    let out = run(&["scan", "--degree", "1", "--vars", "3", "--format", "csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("value,count\n"));
    assert!(csv.contains("1/2,"));

    let dir = tempfile::tempdir().unwrap();
    let qs = write(&dir, "qs.txt", "x1*x2 + x3*x4\n");
    let v = json(&["certify", "--qs", s(&qs), "--gamma", "01", "--t", "2", "--degree", "2"]);
    assert_eq!(v["pr_one"], "3/8");
    assert_eq!(v["dyadic"]["gap"], "1/24");
    assert_eq!(v["delta_2r_bound"], "1/1536");
    assert_eq!(v["delta_dr_bound"]["value"], "1/3072");
}

#[test]
fn search_is_deterministic() {
    let args = [
        "search", "--degree", "3", "--vars", "6", "--steps", "500", "--seed", "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_valid(&v);
    assert_eq!(v["runs"][0]["trace"].as_array().unwrap().len(), 500);

    let v = json(&[
        "search",
        "--degree",
        "2",
        "--vars",
        "4",
        "--steps",
        "300",
        "--greedy",
        "--runs",
        "3",
        "--no-trace",
    ]);
    assert_eq!(v["schedule"], "greedy");
    assert_eq!(v["runs"].as_array().unwrap().len(), 3);
    assert!(v["runs"][0].get("trace").is_none());
}

#[test]
fn worker_count_does_not_change_output() {
    let args = [
        "search", "--degree", "2", "--vars", "5", "--steps", "400", "--runs", "4",
    ];
    let one = bin().args(args).args(["--workers", "1"]).output().unwrap();
    let four = bin().args(args).args(["--workers", "4"]).output().unwrap();
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn verify_suites_pass() {
    for suite in ["gaps", "lemmas", "chebyshev", "regularize", "sunflower"] {
        let v = json(&["verify", "--suite", suite, "--instances", "40"]);
        assert_eq!(v["failed"], 0, "{suite}: {v:#}");
        assert!(v["passed"].as_u64().unwrap() > 0);
    }
    let out = run(&["verify", "--suite", "gaps", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("PASS gaps/delta_2")));
}

#[test]
fn domain_errors_exit_1_with_json() {
    let out = run(&["bias", "--poly", "x1**"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_valid(&v);
    assert_eq!(v["error"]["kind"], "parse");

    let out = run(&["dickson", "--poly", "x1*x2*x3"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "degree_too_high");

    let out = run(&["tv", "--polys", "/nonexistent/file"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "io");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["bias", "--poly", "x1", "--unknown"]).status.code(), Some(2));
    assert_eq!(run(&["bias"]).status.code(), Some(2));
    assert_eq!(run(&["bias", "--poly", "x1", "--rho", "1/0"]).status.code(), Some(2));
    assert_eq!(
        run(&["psi", "--d", "2", "--f", "mul:0", "--vec", "1,1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["bias", "--poly", "x1", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "run.conf", "# run settings\noutput_format = text\nseed = 5\n");
    let out = run(&["--config", s(&cfg), "psi", "--d", "1", "--f", "id", "--vec", "3"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("psi: "));

    let out = bin()
        .env("F2LAB_CONFIG", &cfg)
        .args([
            "search", "--degree", "2", "--vars", "4", "--steps", "10", "--format", "json",
        ])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["runs"][0]["seed"], 5);

    let small = write(&dir, "small.conf", "enumeration_cap_m = 4\n");
    let out = run(&["--config", s(&small), "bias", "--poly", "x5"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "cap_exceeded");

    let bad = write(&dir, "bad.conf", "colour = blue\n");
    assert_eq!(
        run(&["--config", s(&bad), "bias", "--poly", "x1"]).status.code(),
        Some(2)
    );
}

#[test]
fn schema_rejects_malformed_documents() {
    let s = schema();
    let mut v = json(&["bias", "--poly", "x1*x2"]);
    assert!(s.is_valid(&v));
    v["pr_one"] = serde_json::json!(0.25);
    assert!(!s.is_valid(&v));
    let unknown = serde_json::json!({ "schema_version": 1, "command": "bias", "surprise": true });
    assert!(!s.is_valid(&unknown));
    let wrong_version = serde_json::json!({ "schema_version": 2, "error": { "kind": "io", "message": "x" } });
    assert!(!s.is_valid(&wrong_version));
}
