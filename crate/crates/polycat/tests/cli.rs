use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polycat"));
    c.env_remove("POLYCAT_GUARD");
    c
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_truncated_list() {
    let o = run(&["eval", example("list.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fiber 0: 15"), "{}", stdout(&o));
}

#[test]
fn double_dual_line() {
    let o = run(&["double-dual", "--a", "2", "--b", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2X^2 vs 16X^4 : NOT ISO");
    let o = run(&["double-dual", "--a", "2", "--b", "1"]);
    assert!(stdout(&o).trim().ends_with(": ISO"), "{}", stdout(&o));
}

#[test]
fn check_laws_is_deterministic() {
    let o = run(&["check-laws", "--suite", "tensor-unit"]);
    assert_eq!(o.status.code(), Some(0));
    let a = run(&["check-laws", "--suite", "all", "--seed", "11", "--cases", "5"]);
    let b = run(&["check-laws", "--suite", "all", "--seed", "11", "--cases", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_laws_on_a_document() {
    let o = run(&["check-laws", example("sim.json").to_str().unwrap(), "--suite", "tensor-unit", "--cases", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn exit_codes() {
    assert_eq!(with_stdin(&["eval", "-"], "{ not json").status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["check-laws", "--suite", "nonsense"]).status.code(), Some(1));
    let bad = r#"{ "diagrams": { "p": { "inputs": 1, "outputs": 1, "input_of": [3], "shape_of": [0], "output_of": [0] } } }"#;
    assert_eq!(with_stdin(&["eval", "-"], bad).status.code(), Some(2));
    let o = bin().env("POLYCAT_GUARD", "10").args(["eval", example("list.json").to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = bin().env("POLYCAT_GUARD", "ten").args(["double-dual", "--a", "1", "--b", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_output_round_trips() {
    let list = example("list.json");
    let o = run(&["tensor", list.to_str().unwrap(), "list", "list", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let doc = polycat::Document::parse(&text).unwrap();
    let model = doc.resolve().unwrap();
    assert_eq!(polycat::Document::parse(&model.to_document().to_json()).unwrap(), model.to_document());
    let o = with_stdin(&["count-nat", "-", "result", "result"], &text);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulation_commands() {
    let sim = example("sim.json");
    let sim = sim.to_str().unwrap();
    let o = run(&["sim-validate", sim]);
    assert!(stdout(&o).contains("VALID"));
    let o = run(&["sim-eval", sim, "swap", "x"]);
    assert!(stdout(&o).contains("map: [2, 3, 0, 1]"), "{}", stdout(&o));
    let o = run(&["sim-compose", sim, "swap", "swap"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
