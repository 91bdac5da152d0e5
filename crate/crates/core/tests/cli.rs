use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn balcov(args: &[&str]) -> Output {
    let args: Vec<String> = args
        .iter()
        .map(|a| {
            if a.ends_with(".json") && !a.contains('/') {
                data(a)
            } else {
                a.to_string()
            }
        })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_balcov")).args(&args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn result(args: &[&str]) -> Value {
    let out = balcov(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    json(&out)["result"].clone()
}

#[test]
fn manifest_records_inputs_and_seed() {
    let out = balcov(&["--seed", "9", "balanced", "--config", "square.json"]);
    let v = json(&out);
    let m = &v["manifest"];
    assert_eq!(m["tool"], "balcov");
    assert_eq!(m["subcommand"], "balanced");
    assert_eq!(m["seed"], 9);
    assert_eq!(m["inputs"]["config"].as_str().unwrap().len(), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("balanced finished in"));
}

#[test]
fn balanced_and_complex_of_square() {
    let r = result(&["balanced", "--config", "square.json"]);
    assert_eq!(r["minimal_balanced"], serde_json::json!([[1, 3], [2, 4]]));
    assert_eq!(r["r_in_relative_interior"], true);
    let h = balcov(&["homology", "--config", "square.json"]);
    assert!(String::from_utf8_lossy(&h.stdout).contains("\"betti\": 1"));
}

#[test]
fn homology_of_projective_plane_has_torsion() {
    let r = result(&["homology", "--complex", "rp2.json"]);
    let groups = r["homology"].as_array().unwrap();
    let h1 = groups.iter().find(|g| g["degree"] == 1).unwrap();
    assert_eq!(h1["torsion"], serde_json::json!([2]));
}

#[test]
fn equivalence_commands() {
    assert_eq!(
        result(&["equiv", "--config", "square.json", "--config", "square_scaled.json"])["equivalent"],
        true
    );
    let r = result(&[
        "equiv",
        "--config",
        "square.json",
        "--config",
        "square_shuffled.json",
        "--up-to-permutation",
    ]);
    assert_eq!(r["equivalent"], true);
}

#[test]
fn degree_and_circle() {
    let r = result(&[
        "degree",
        "--config",
        "triangle.json",
        "--triangulation",
        "cycle3.json",
        "--cover",
        "abc.json",
    ]);
    assert_eq!(r["degree"], 1);
    assert_eq!(r["status"], "ok");
    let r = result(&["make-circle", "--config", "square.json", "--k", "-2"]);
    assert_eq!(r["degree"], -2);
}

#[test]
fn degree_outside_is_zero() {
    let r = result(&[
        "degree",
        "--config",
        "triangle_outside.json",
        "--triangulation",
        "cycle3.json",
        "--cover",
        "abc.json",
    ]);
    assert_eq!(r["degree"], 0);
}

#[test]
fn applications() {
    let r = result(&["--seed", "4", "sperner", "--instance", "sperner.json"]);
    assert_eq!(r["signed_count"].as_i64().unwrap().abs(), 1);
    result(&["kkm", "--instance", "kkm.json"]);
    result(&["kkms", "--instance", "kkms.json"]);
    let r = result(&[
        "theorem-b",
        "--config",
        "square.json",
        "--triangulation",
        "disk.json",
        "--cover",
        "disk_cover.json",
    ]);
    assert_eq!(r["status"], "witness");
    assert_eq!(r["balanced_core"], serde_json::json!([1, 3]));
}

#[test]
fn index_with_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg: PathBuf = dir.path().join("field.svg");
    let r = result(&[
        "index",
        "--grid",
        "bivortex.json",
        "--config",
        "square.json",
        "--emit-svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(r["additivity"], true);
    assert_eq!(r["outer_degree"], 0);
    let mut idx: Vec<i64> = r["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["index"].as_i64().unwrap())
        .collect();
    idx.sort();
    assert_eq!(idx, vec![-1, 1]);
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn csv_output_starts_with_manifest() {
    let out = balcov(&["--format", "csv", "balanced", "--config", "square.json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# "));
    assert!(text.contains("# subcommand: balanced"));
    assert!(text.lines().any(|l| l == "1,1 3"));
}

#[test]
fn exit_codes() {
    let out = balcov(&["balanced", "--config", "bad_rational.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["failure"]["error"]["kind"], "input");
    assert_eq!(
        balcov(&["balanced", "--config", "/nonexistent/x.json"]).status.code(),
        Some(2)
    );
    assert_eq!(balcov(&["balanced", "--bogus"]).status.code(), Some(64));
    assert_eq!(balcov(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(balcov(&["--help"]).status.code(), Some(0));
    assert_eq!(balcov(&["--version"]).status.code(), Some(0));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["--seed", "17", "kkms", "--instance", "kkms.json"];
    assert_eq!(balcov(&args).stdout, balcov(&args).stdout);
}

#[test]
fn degree_does_not_depend_on_seed() {
    let a = json(&balcov(&[
        "--seed",
        "1",
        "degree",
        "--config",
        "triangle.json",
        "--triangulation",
        "cycle3.json",
        "--cover",
        "abc.json",
    ]));
    let b = json(&balcov(&[
        "--seed",
        "2",
        "degree",
        "--config",
        "triangle.json",
        "--triangulation",
        "cycle3.json",
        "--cover",
        "abc.json",
    ]));
    assert_eq!(a["result"]["degree"], b["result"]["degree"]);
}
