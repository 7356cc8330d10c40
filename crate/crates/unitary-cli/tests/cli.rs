//! End-to-end checks for the command-line interface: exit codes, JSON
//! output shape, and the round-trip property of serialized reports.

use std::process::{Command, Output};

use serde_json::Value;

fn unitary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitary"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    let text = String::from_utf8(output.stdout.clone()).expect("utf8 stdout");
    serde_json::from_str(text.trim()).expect("one JSON value per line")
}

#[test]
fn vstar_all_methods_agree_on_d8() {
    let out = unitary(&["vstar", "D8", "--field", "2", "--method", "all", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["agreement"], Value::Bool(true));
    assert_eq!(report["group_order"], 8);
    for method in report["methods"].as_array().unwrap() {
        assert_eq!(method["status"], "exact");
        assert_eq!(method["value"]["integer"], 64);
    }
}

#[test]
fn vstar_recursion_handles_central_product() {
    let out = unitary(&[
        "vstar", "Q8 . D8", "--field", "2", "--method", "recursion", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    let recursion = &report["methods"][1];
    assert_eq!(recursion["method"], "recursion");
    assert_eq!(recursion["status"], "exact");
    assert_eq!(recursion["value"]["integer"], 2_097_152);
}

#[test]
fn vstar_json_round_trips() {
    let out = unitary(&["vstar", "M2(2,2)", "--field", "4", "--method", "formula", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let first = stdout_json(&out);
    let reparsed: Value =
        serde_json::from_str(&serde_json::to_string(&first).unwrap()).unwrap();
    assert_eq!(first, reparsed);
}

#[test]
fn group_reports_structure() {
    let out = unitary(&["group", "Q8", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["order"], 8);
    assert_eq!(report["abelian"], Value::Bool(false));
    assert_eq!(report["derived_order"], 2);
    assert_eq!(report["omega1"], 2);
    assert_eq!(report["omega_c"], 6);
}

#[test]
fn classify_builds_family_instance() {
    let out = unitary(&[
        "classify", "--theorem", "ST5c", "--case", "i", "--params", "n=1,m=1,k=1,r=2",
        "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["theorem"], "ST5");
    assert_eq!(report["case"], 1);
    let order = report["order"].as_u64().unwrap();
    assert!(order.is_power_of_two());
    assert!(!report["spec"].as_str().unwrap().is_empty());
}

#[test]
fn verify_lemmas_suite_passes() {
    let out = unitary(&["verify", "--suite", "lemmas"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn invalid_arguments_exit_with_usage_code() {
    assert_eq!(unitary(&["vstar", "D8", "--field", "3"]).status.code(), Some(2));
    assert_eq!(unitary(&["verify", "--suite", "huge"]).status.code(), Some(2));
    assert_eq!(unitary(&["vstar", "D$8"]).status.code(), Some(2));
}
