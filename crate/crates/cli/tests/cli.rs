use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nchatl"))
}

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = bin().args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_dual_with_first_norm_holds() {
    let m = models();
    let r = run(&[
        "check",
        "--model",
        path(&m.join("model.json")),
        "--norm",
        path(&m.join("eta.json")),
        "--comply",
        "none",
        "--formula",
        "[{9,10}] [[{7-10}]] X (p1 & p2)",
        "--state",
        "q0",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("verdict at q0: true"));
}

#[test]
fn check_nine_agents_fail_without_norm() {
    let m = models();
    let r = run(&[
        "check",
        "--model",
        path(&m.join("model.json")),
        "--formula",
        "<<{1-9}>> X (p1 & p2)",
        "--state",
        "q0",
        "--format",
        "structured",
    ]);
    assert_eq!(r.code, 1);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["verdict"], Value::Bool(false));
    for key in ["formula", "compliance", "states", "wall_time_ms"] {
        assert!(doc.get(key).is_some(), "{key}");
    }
}

#[test]
fn true_lists_every_state_in_both_formats() {
    let model = models().join("model.json");
    let text = run(&["check", "--model", path(&model), "--formula", "true"]);
    assert_eq!(text.code, 0);
    let line = text.stdout.lines().find(|l| l.starts_with("states: ")).unwrap();
    let listed: Vec<&str> = line["states: ".len()..].split(", ").collect();
    assert_eq!(listed.len(), 16);
    let structured = run(&["check", "--model", path(&model), "--formula", "true", "--format", "structured"]);
    let doc: Value = serde_json::from_str(&structured.stdout).unwrap();
    let names: Vec<&str> = doc["states"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(names, listed);
}

#[test]
fn queries_file_reports_each_query() {
    let m = models();
    let r = run(&[
        "check",
        "--model",
        path(&m.join("model.json")),
        "--norm",
        path(&m.join("eta_prime.json")),
        "--queries",
        path(&m.join("queries.txt")),
        "--state",
        "q0",
        "--format",
        "structured",
    ]);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    let names: Vec<&str> = doc["queries"].as_array().unwrap().iter().map(|q| q["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["grand", "dual", "choice", "block"]);
    let choice = &doc["queries"][2];
    assert_eq!(choice["verdict"], Value::Bool(true));
}

#[test]
fn parse_errors_exit_two_with_position() {
    let model = models().join("model.json");
    let r = run(&["check", "--model", path(&model), "--formula", "p1 & & p2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("column 6"), "{}", r.stderr);
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"agents\": 2,\n\"states\": [").unwrap();
    let r = run(&["check", "--model", path(&broken), "--formula", "true"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
    let r = run(&["check", "--model", path(&model), "--formula", "true", "--comply", "1-11"]);
    assert_eq!(r.code, 2);
}

#[test]
fn validation_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let model = models().join("model.json");
    assert_eq!(run(&["validate", "--model", path(&model)]).stdout, "OK\n");

    let norm = dir.path().join("norm.json");
    std::fs::write(&norm, r#"{"rules": [{"state": "q0", "agents": [1], "forbid": [1, 2]}]}"#).unwrap();
    let r = run(&["validate", "--model", path(&model), "--norm", path(&norm)]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("no legal action for agent 1 at q0"), "{}", r.stdout);
    let r = run(&["check", "--model", path(&model), "--norm", path(&norm), "--formula", "true"]);
    assert_eq!(r.code, 3);

    let gap = dir.path().join("gap.json");
    std::fs::write(
        &gap,
        r#"{"agents": 2, "propositions": [], "states": [{"id": "q0", "actions": 2,
            "transitions": {"rules": [{"guards": [{"action": 1, "min": 0, "max": 1}], "to": "q0"}]}}]}"#,
    )
    .unwrap();
    let r = run(&["validate", "--model", path(&gap)]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("profile (2,0) unresolved at q0"), "{}", r.stdout);
}

#[test]
fn expand_small_refuse_large() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["family", "--n", "3", "--out", path(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = run(&["expand", "--model", path(&dir.path().join("model.json")), "--format", "structured"]);
    assert_eq!(r.code, 0);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    let q0 = doc["states"].as_array().unwrap().iter().find(|s| s["id"] == "q0").unwrap();
    assert_eq!(q0["transitions"].as_array().unwrap().len(), 8);

    let big = dir.path().join("big");
    run(&["family", "--n", "10000", "--out", path(&big)]);
    let r = run(&["expand", "--model", path(&big.join("model.json"))]);
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("budget"));

    let single = dir.path().join("single.json");
    std::fs::write(
        &single,
        r#"{"agents": 2, "states": [{"id": "s", "actions": 1, "transitions": {"default": "s"}}]}"#,
    )
    .unwrap();
    let r = run(&["expand", "--model", path(&single), "--format", "structured"]);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["states"][0]["transitions"].as_array().unwrap().len(), 1);
}

#[test]
fn oracle_passes_and_catches_injection() {
    let r = run(&["oracle", "--seed", "3", "--instances", "50"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("50/50 pass"));
    let r = run(&["oracle", "--instances", "0"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("0/0 pass"));
    let r = run(&["oracle", "--instances", "5", "--inject-literal-legal-count"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("first counterexample (regression scenario)"));
}

#[test]
fn structured_output_is_deterministic() {
    let strip = |s: &str| {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_ms");
        v
    };
    let a = run(&["oracle", "--seed", "9", "--instances", "30", "--format", "structured"]);
    let b = run(&["oracle", "--seed", "9", "--instances", "30", "--format", "structured"]);
    assert_eq!(strip(&a.stdout), strip(&b.stdout));
    let model = models().join("model.json");
    let args = ["check", "--model", path(&model), "--formula", "<<{1-5}>> X p2", "--format", "structured"];
    assert_eq!(strip(&run(&args).stdout), strip(&run(&args).stdout));
}

#[test]
fn bench_reports_profile_counts() {
    let r = run(&["bench", "--n", "10,100", "--format", "structured"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let n = row["n"].as_u64().unwrap();
        assert_eq!(row["profile_set_size"].as_u64().unwrap(), n + 1);
    }
}
