use std::path::PathBuf;

use serde_json::Value;
use symhyp_cli::{main_with_args, EXIT_INVALID, EXIT_OK, EXIT_PARSE};

fn problem(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "problems", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("symhyp".to_string()).chain(args.iter().map(|s| s.to_string()));
    let code = main_with_args(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn validate_reports_each_check() {
    let (code, out) = run(&["validate", &problem("boundary.json")]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("PASS axis 1: left dissipativity"));
    let (code, out) = run(&["validate", &problem("boundary_flipped.json"), "--json"]);
    assert_eq!(code, EXIT_INVALID);
    let v: Value = serde_json::from_str(&out).unwrap();
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["axis 1: left dissipativity", "axis 1: right dissipativity"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"cauchy\", \"m\": 3}").unwrap();
    assert_eq!(run(&["validate", bad.to_str().unwrap()]).0, EXIT_PARSE);
    assert_eq!(run(&["validate", "/nonexistent/problem.json"]).0, EXIT_PARSE);
    assert_eq!(run(&["plan", &problem("bad.json")]).0, EXIT_INVALID);
    assert_eq!(run(&["frobnicate"]).0, EXIT_PARSE);
    // a diagonal A with one-signed speeds has no domain of determinacy
    let one_sided = dir.path().join("one_sided.json");
    std::fs::write(
        &one_sided,
        r#"{"kind": "cauchy", "m": 1, "n": 2, "A": [["1","0"],["0","1"]], "B": [[["1","0"],["0","2"]]],
            "phi": [[], []], "precision_a": 2}"#,
    )
    .unwrap();
    let (code, _) = run(&["domain", one_sided.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn domain_and_plan() {
    let (code, out) = run(&["domain", &problem("pencil.json"), "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["axes"][0]["mu_min"], "-1");
    assert_eq!(v["axes"][0]["mu_max"], "1");
    assert_eq!(v["T"], "1/2");
    let (code, out) = run(&["plan", &problem("advection.json"), "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["plan"]["N"], 7);
    assert_eq!(v["plan"]["tau"], "1/384");
}

#[test]
fn solve_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let od = out_dir.to_str().unwrap();
    let (code, out) = run(&["solve", &problem("boundary.json"), "--out", od, "--backend", "exact"]);
    assert_eq!(code, EXIT_OK, "{out}");
    for f in ["layers.csv", "certificate.json", "report.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(out_dir.join("layers.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("l,i,j,u1,u2"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "solve");
    let layers = out_dir.join("layers.csv");
    let (code, out) = run(&["eval", &problem("boundary.json"), layers.to_str().unwrap(), "0", "1/2", "--json"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    // N = 6: x - x^2 is symmetric about 1/2, so the value at 63/128 is returned
    assert_eq!(v["value"][0], "4095/16384");
    assert!(v["sL2_error_bound"].is_string());
}

#[test]
fn convergence_table_prints_ratios() {
    let (code, out) = run(&["convergence", &problem("pencil.json"), "--levels", "2", "--start-n", "3", "--json"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["levels"].as_array().unwrap().len(), 2);
}
