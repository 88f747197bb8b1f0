use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn lefkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lefkit")).args(args).output().expect("run lefkit")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lefkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn spin_of_xprime_3_0() {
    let out = lefkit(&["spin", "--family", "xprime", "--g", "3", "--i", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out), serde_json::json!({"spin": false}));
}

#[test]
fn check_sweep_passes() {
    let out = lefkit(&["check", "--family", "xprime", "--g", "3..5", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.contains("pass")).count(), 14, "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn seven_lanterns_logged() {
    let out = lefkit(&["replay", "--script", "sevenLS"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    let subs = v["log"].as_array().unwrap().iter().filter(|s| s["op"] == "substitute").count();
    assert_eq!(subs, 7);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lefkit(&["build", "--family", "nope", "--g", "3"]).status.code(), Some(2));
    assert_eq!(lefkit(&["build", "--family", "xprime", "--g", "4", "--i", "4"]).status.code(), Some(2));
    assert_eq!(lefkit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lefkit(&["check", "--family", "exotic", "--g", "3"]).status.code(), Some(2));
}

#[test]
fn broken_word_fails_verification() {
    let out = lefkit(&["build", "--family", "xprime", "--g", "3", "--i", "1"]);
    let mut v = json_of(&out);
    v["letters"][5]["exp"] = Value::from(-1);
    let path = scratch("broken.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = lefkit(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let d = json_of(&out);
    assert_eq!(d["pass"], Value::Bool(false));
    assert!(d["witness"].is_array());
}

#[test]
fn export_import_round_trip() {
    let path = scratch("k3.json");
    let out = lefkit(&["catalog", "export", "--family", "kg", "--g", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let from_file = lefkit(&["invariants", "--input", path.to_str().unwrap()]);
    let direct = lefkit(&["invariants", "--family", "kg", "--g", "3"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, direct.stdout);
    let v = json_of(&direct);
    assert_eq!(v["euler"], Value::from(24));
    assert_eq!(v["signature"], Value::from(-16));
    assert_eq!(v["kodaira"], Value::from("0"));
    assert_eq!(lefkit(&["verify", "--input", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn keys_are_sorted() {
    let out = lefkit(&["invariants", "--family", "exotic", "--k", "3"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(keys.len() > 5);
}

#[test]
fn substitution_from_the_command_line() {
    let base = lefkit(&["build", "--family", "exotic", "--k", "0"]);
    assert_eq!(base.status.code(), Some(0));
    // L1 does not match the first letters of X_0
    let path = scratch("x0.json");
    std::fs::write(&path, &base.stdout).unwrap();
    let out = lefkit(&["substitute", "--input", path.to_str().unwrap(), "--relator", "L1", "--at", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json_of(&out)["error"].is_string());
}

#[test]
fn catalog_lists_everything() {
    let v = json_of(&lefkit(&["catalog"]));
    assert!(v["families"].as_array().unwrap().iter().any(|f| f == "xprime"));
    assert!(v["scripts"].as_array().unwrap().iter().any(|f| f == "sevenLS"));
}
