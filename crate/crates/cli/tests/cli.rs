use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn tropdol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropdol")).args(args).output().expect("spawn tropdol")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn ingest(dir: &TempDir, p: &str, points: &str) -> String {
    let m = path(dir, "m.json");
    let out = tropdol(&["ingest-points", "--p", p, "--points", points, "--output", &m]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    m
}

#[test]
fn ingest_points_matrix() {
    let out = tropdol(&["ingest-points", "--p", "5", "--points", "0,1,5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["n"], 3);
    assert_eq!(v["L"], json!([["-inf", "0", "-1"], ["0", "-inf", "0"], ["-1", "0", "-inf"]]));
}

#[test]
fn ingest_points_fractions_and_duplicates() {
    let out = tropdol(&["ingest-points", "--p", "2", "--points", "0,1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["L"][0][1], "1");
    let out = tropdol(&["ingest-points", "--p", "2", "--points", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tropicalize_both_methods_agree() {
    let dir = TempDir::new().unwrap();
    let m = ingest(&dir, "3", "0,1,3,9,2");
    let out = tropdol(&["tropicalize", "--input", &m, "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("methods agree: true"));
    let direct = tropdol(&["tropicalize", "--input", &m]);
    assert_eq!(stdout_json(&out), stdout_json(&direct));
    let incremental = tropdol(&["tropicalize", "--input", &m, "--method", "incremental"]);
    assert_eq!(stdout_json(&incremental), stdout_json(&direct));
}

#[test]
fn check_curve_and_matrix() {
    let dir = TempDir::new().unwrap();
    let m = ingest(&dir, "5", "0,1,5");
    let c = path(&dir, "c.json");
    assert!(tropdol(&["tropicalize", "--input", &m, "--output", &c]).status.success());
    let out = tropdol(&["check", "--input", &c]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["balanced"], true);
    assert_eq!(v["smooth"], true);

    let out = tropdol(&["check", "--input", &m]);
    assert_eq!(out.status.code(), Some(0));

    // 0 and 1 at distance 0, 1 and 2 at distance -1, 0 and 2 at -2: not ultrametric
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, json!({"n": 3, "L": [["-inf", "0", "-2"], ["0", "-inf", "-1"], ["-2", "-1", "-inf"]]}).to_string())
        .unwrap();
    let out = tropdol(&["check", "--input", &bad]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cohomology_of_tropical_line() {
    let dir = TempDir::new().unwrap();
    let m = ingest(&dir, "7", "0,1,2");
    let c = path(&dir, "c.json");
    assert!(tropdol(&["tropicalize", "--input", &m, "--output", &c]).status.success());
    let out = tropdol(&["cohomology", "--input", &c]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["h"], json!([[1, 0], [0, 0]]));
    assert_eq!(v["hc"], json!([[0, 0], [0, 1]]));
    let out = tropdol(&["cohomology", "--input", &c, "--compact"]);
    let v = stdout_json(&out);
    assert!(v.get("h").is_none());
    assert_eq!(v["hc"], json!([[0, 0], [0, 1]]));
    let out = tropdol(&["pd", "--input", &c]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["pd"], true);
}

#[test]
fn mumford_tables() {
    let out = tropdol(&["mumford", "--genus", "2", "--verify", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verified: true"));
    let v = stdout_json(&out);
    assert_eq!(v["h"], json!([[1, 2], [2, 1]]));
    assert_eq!(v["hc"], json!([[1, 2], [2, 1]]));
}

#[test]
fn skeleton_input() {
    let dir = TempDir::new().unwrap();
    let s = path(&dir, "s.json");
    let theta = json!({"vertices": [0, 1], "edges": [
        {"id": 0, "ends": [0, 1], "length": "1"},
        {"id": 1, "ends": [0, 1], "length": "2"},
        {"id": 2, "ends": [0, 1], "length": "1/2"}
    ]});
    std::fs::write(&s, theta.to_string()).unwrap();
    let out = tropdol(&["mumford", "--skeleton", &s, "--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["h"], json!([[1, 2], [2, 1]]));
    let out = tropdol(&["cohomology", "--skeleton", &s]);
    assert_eq!(stdout_json(&out)["h"], json!([[1, 2], [2, 1]]));
    let out = tropdol(&["pd", "--skeleton", &s]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn modify_two_point_curve() {
    let dir = TempDir::new().unwrap();
    let m = ingest(&dir, "5", "0,1");
    let c = path(&dir, "c.json");
    assert!(tropdol(&["tropicalize", "--input", &m, "--output", &c]).status.success());
    let curve: Value = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    // value 0 at finite vertices, slope 1 toward the free end, 0 elsewhere
    let mut values = serde_json::Map::new();
    for v in curve["vertices"].as_array().unwrap() {
        if v["coords"].as_array().unwrap().iter().all(|x| x != "-inf") {
            values.insert(v["id"].to_string(), json!("0"));
        }
    }
    let mut slopes = serde_json::Map::new();
    for (i, e) in curve["edges"].as_array().unwrap().iter().enumerate() {
        slopes.insert(i.to_string(), json!(if e.get("free").is_some() { 1 } else { 0 }));
    }
    let paf = path(&dir, "paf.json");
    std::fs::write(&paf, json!({"values": values, "slopes": slopes}).to_string()).unwrap();
    let out = tropdol(&["modify", "--input", &c, "--paf", &paf]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_json(&out).is_object());
}

#[test]
fn modify_unsubdivided_line_is_rejected() {
    let dir = TempDir::new().unwrap();
    let m = ingest(&dir, "5", "0");
    let c = path(&dir, "c.json");
    assert!(tropdol(&["tropicalize", "--input", &m, "--output", &c]).status.success());
    let paf = path(&dir, "paf.json");
    std::fs::write(&paf, json!({"values": {}, "slopes": {"0": 1}}).to_string()).unwrap();
    let out = tropdol(&["modify", "--input", &c, "--paf", &paf]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no finite end"));
}

#[test]
fn error_exit_codes() {
    let out = tropdol(&["check", "--input", "/nonexistent/input.json"]);
    assert_eq!(out.status.code(), Some(3));
    let dir = TempDir::new().unwrap();
    let junk = path(&dir, "junk.json");
    std::fs::write(&junk, "{\"n\": 2").unwrap();
    let out = tropdol(&["tropicalize", "--input", &junk]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new(&path(&dir, "none.json")).exists());
}

#[test]
fn selftest_small() {
    let out = tropdol(&["selftest", "--seed", "3", "--cases", "10", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 7);
}
