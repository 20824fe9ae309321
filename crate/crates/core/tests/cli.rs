use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halphen")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn non_homogeneous_input_is_a_usage_error() {
    let out = run(&["parse-check", "x^2+y"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not homogeneous"), "{err}");
    assert!(err.contains("Examples"), "{err}");
}

#[test]
fn parse_check_reports_degree() {
    let out = run(&["parse-check", "x^2*z + t*z^2 + y^3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["degree"], 3);
}

#[test]
fn unknown_subcommand_and_missing_file() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["invariants", "--curve", "/nonexistent/curve.json"]).status.code(), Some(3));
}

#[test]
fn viviani_rank() {
    let out = run(&["invariants", "--curve", &corpus("viviani.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rank"], 6);
}

#[test]
fn twisted_cubic_transform_has_degree_seven() {
    let out = run(&["transform", "--curve", &corpus("twisted_cubic.json"), "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["image"]["image_degree"], 7);
    assert_eq!(v["image"]["map_degree"], 1);
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let args = ["transform", "--curve", &corpus("sextic_rational.json"), "--seed", "3"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let again = serde_json::to_string_pretty(&v).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&again).unwrap(), v);
    // The reduced parametrization parses back as a curve file.
    let gamma = v["reduced"].clone();
    assert!(gamma.as_array().is_some_and(|g| g.len() == 4), "{v}");
}

#[test]
fn verify_emits_one_record_per_line() {
    let out = run(&["verify", "--curve", &corpus("twisted_cubic.json"), "--trials", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let records: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!records.is_empty());
    for r in &records {
        assert_eq!(r["prng"], "ChaCha8");
        assert!(r["status"].is_string() && r["route"].is_string());
    }
}

#[test]
fn ladder_trace() {
    let out = run(&["desing", "--branches", &corpus("ladder.json"), "--both"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let trace = &v[0];
    let chain: Vec<Value> = std::iter::once(trace["initial"].clone())
        .chain(trace["steps"].as_array().unwrap().iter().map(|s| s["oracle"].clone()))
        .collect();
    let expected: Value = serde_json::json!([[4, 5, 11], [1, 4, 7], [1, 3, 6], [1, 2, 5], [1, 2, 4], [1, 2, 3]]);
    assert_eq!(Value::Array(chain), expected);
    assert_eq!(trace["reached_ordinary"], true);
}
