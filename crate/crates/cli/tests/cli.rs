use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dagtrail")).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dagtrail"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn validate_reports_size() {
    let o = run(&["--output", "json", "validate", &fixture("fig1.json")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["nodes"], 7);
    assert_eq!(v["arcs"], 9);
}

#[test]
fn dot_and_json_inputs_agree() {
    for z in ["", "v5", "v7", "v1,v5"] {
        let a = run(&["--output", "json", "dsep", &fixture("fig1.json"), "--x", "v2", "--y", "v6", "--z", z]);
        let b = run(&["--output", "json", "dsep", &fixture("fig1.dot"), "--x", "v2", "--y", "v6", "--z", z]);
        assert_eq!(code(&a), code(&b));
        assert_eq!(json(&a)["separated"], json(&b)["separated"]);
    }
}

#[test]
fn text_and_json_verdicts_agree() {
    let g = fixture("fig1.json");
    for (z, sep) in [("", true), ("v5", false), ("v1,v5", false), ("v3", true)] {
        let t = run(&["dsep", &g, "--x", "v2", "--y", "v6", "--z", z]);
        let j = run(&["--output", "json", "dsep", &g, "--x", "v2", "--y", "v6", "--z", z]);
        assert_eq!(stdout(&t).lines().next(), Some(if sep { "true" } else { "false" }), "z = {z}");
        assert_eq!(json(&j)["separated"], sep);
        assert_eq!(code(&t), if sep { 0 } else { 10 });
    }
}

#[test]
fn graph_from_stdin() {
    let bytes = std::fs::read(fixture("fig1.json")).unwrap();
    let o = run_stdin(&["--output", "json", "dsep", "-", "--x", "v2", "--y", "v6", "--z", "v5"], &bytes);
    assert_eq!(code(&o), 10);
    assert_eq!(json(&o)["witness"], "v2 -> v5 <- v3 -> v6");
}

#[test]
fn trails_lists_keys() {
    let o = run(&["--output", "json", "trails", &fixture("diamond.json"), "--x", "1", "--y", "4"]);
    let v = json(&o);
    let rendered: Vec<&str> = v["trails"].as_array().unwrap().iter().map(|t| t["trail"].as_str().unwrap()).collect();
    assert_eq!(v["count"], rendered.len());
    assert!(rendered.contains(&"1 -> 2 -> 3 -> 4"));
    let limited = json(&run(&["--output", "json", "trails", &fixture("diamond.json"), "--x", "1", "--y", "4", "--limit", "1"]));
    assert_eq!(limited["trails"].as_array().unwrap().len(), 1);
}

#[test]
fn minimal_text_output() {
    let o = run(&["minimal", &fixture("fig1.json"), "--x", "v1", "--y", "v6", "--z", "v5"]);
    let s = stdout(&o);
    assert!(s.contains("1 minimizer(s)"), "{s}");
    assert!(s.contains("v1 -> v2 -> v5 <- v3 -> v6"));
    assert!(s.contains("C = 1"));
}

#[test]
fn minimal_descendant_witness() {
    let o = run(&[
        "--output", "json", "minimal", &fixture("counter.json"), "--x", "x", "--y", "y", "--z", "c1,d1,c3",
    ]);
    let v = json(&o);
    let w = &v["minimizers"][0]["witnesses"];
    assert_eq!(w[1]["node"], "c2");
    assert_eq!(w[1]["kind"], "ViaDescendant");
    assert_eq!(w[1]["target"], "d1");
}

#[test]
fn cycles_exit_codes() {
    assert_eq!(code(&run(&["cycles", &fixture("fig3.json")])), 11);
    assert_eq!(code(&run(&["cycles", &fixture("fig1.json")])), 0);
    let s = stdout(&run(&["cycles", &fixture("fig3.json")]));
    assert!(s.contains("v5 <- v2 <- v1 -> v4 -> v5"), "{s}");
}

#[test]
fn localrel_partition() {
    let o = run(&["--output", "json", "localrel", &fixture("fig1.json"), "--k", "v1,v2,v4", "--decompose"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["local"], true);
    assert!(v["partition"].is_array());
    assert_eq!(code(&run(&["localrel", &fixture("fig1.json"), "--k", ""])), 65);
}

#[test]
fn verify_small_run() {
    let o = run(&["--output", "json", "verify", "--mode", "exhaustive", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 11);
    let o = run(&["verify", "--mode", "random", "--n", "5", "--count", "20", "--checks", "dsep-agreement,no-chords"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.contains("PASS")).count(), 2);
}

#[test]
fn verify_rejects_bad_arguments() {
    assert_eq!(code(&run(&["verify", "--mode", "exhaustive", "--n", "3", "--checks", "nope"])), 64);
    assert_eq!(code(&run(&["verify", "--mode", "exhaustive", "--n", "10"])), 64);
    assert_eq!(code(&run(&["verify", "--mode", "random", "--n", "4", "--p", "1.5"])), 64);
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(code(&run(&["dsep"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
    let o = run(&["--output", "json", "validate", &fixture("selfloop.dot")]);
    assert_eq!(code(&o), 65);
    assert_eq!(json(&o)["exit_code"], 65);
    assert!(json(&o)["error"].as_str().unwrap().contains("self-loop"));
    assert_eq!(code(&run(&["dsep", &fixture("fig1.json"), "--x", "v2", "--y", "nope"])), 65);
    assert_eq!(code(&run(&["dsep", &fixture("fig1.json"), "--x", "v2", "--y", "v2"])), 65);
    assert_eq!(code(&run(&["validate", "/nonexistent/graph.json"])), 66);
}

#[test]
fn cyclic_input_is_rejected() {
    let o = run_stdin(&["validate", "-"], br#"{"nodes": ["a", "b"], "edges": [["a", "b"], ["b", "a"]]}"#);
    assert_eq!(code(&o), 65);
    let o = run_stdin(&["validate", "-"], b"digraph { a -> b -> c -> a }");
    assert_eq!(code(&o), 65);
}
