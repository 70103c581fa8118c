//! End-to-end checks of the `kripke` binary: exit codes, output shapes, and
//! determinism of the fuzz runner.

use std::path::PathBuf;
use std::process::{Command, Output};

fn kripke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kripke"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const TWO_CHAIN: &str = r#"{
  "signature": {"kind": "propositional", "atoms": ["p"]},
  "nodes": ["a", "b"],
  "edges": [["a", "b"]],
  "atoms": {"b": ["p"]}
}"#;

const BROKEN_MONOTONE: &str = r#"{
  "signature": {"kind": "propositional", "atoms": ["p"]},
  "nodes": ["a", "b"],
  "edges": [["a", "b"]],
  "atoms": {"a": ["p"]}
}"#;

const FO_GROWTH: &str = r#"{
  "signature": {"kind": "first-order", "relations": [["R", 1]], "constants": []},
  "nodes": ["a", "b"],
  "edges": [["a", "b"]],
  "domains": {"a": ["0"], "b": ["0", "1"]},
  "atoms": {"b": [["R", "0"]]}
}"#;

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_temp(&dir, "good.json", TWO_CHAIN);
    let out = kripke(&["check", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid"));

    let bad = write_temp(&dir, "bad.json", BROKEN_MONOTONE);
    let out = kripke(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("monotonicity") && stderr.contains('p'), "{stderr}");

    let malformed = write_temp(&dir, "malformed.json", "{ not json");
    let out = kripke(&["check", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn force_reports_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_temp(&dir, "m.json", TWO_CHAIN);
    let out = kripke(&["force", model.to_str().unwrap(), "a", "p | ~p"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("not forced"));
    assert!(stdout.contains("classical: true"));

    let out = kripke(&["force", model.to_str().unwrap(), "b", "p | ~p"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("forcing: forced"));

    let out = kripke(&["force", model.to_str().unwrap(), "zzz", "p"]);
    assert_eq!(out.status.code(), Some(2));

    let out = kripke(&["force", model.to_str().unwrap(), "a", "p |"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn localize_verify_roundtrip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_temp(&dir, "m.json", TWO_CHAIN);
    let out = kripke(&["localize", model.to_str().unwrap(), "a", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rho"], "_|_ | (p | ~p)");
    assert_eq!(doc["verification"]["mismatches"], 0);

    let cert = write_temp(&dir, "cert.json", &doc.to_string());
    let out = kripke(&["verify", model.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    // Consistent but wrong: drop the only step, rho becomes _|_.
    let mut corrupted = doc.clone();
    corrupted["trace"] = serde_json::json!([]);
    corrupted["rho"] = serde_json::json!("_|_");
    let cert = write_temp(&dir, "corrupted.json", &corrupted.to_string());
    let out = kripke(&["verify", model.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");

    // Inconsistent: stored rho does not match the witness chain.
    let mut inconsistent = doc.clone();
    inconsistent["rho"] = serde_json::json!("_|_");
    let cert = write_temp(&dir, "inconsistent.json", &inconsistent.to_string());
    let out = kripke(&["verify", model.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn localize_classical_node_and_sentential_mode() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_temp(&dir, "m.json", TWO_CHAIN);
    let out = kripke(&["localize", model.to_str().unwrap(), "b", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rho"], "_|_");

    let fo = write_temp(&dir, "fo.json", FO_GROWTH);
    let out = kripke(&["localize", fo.to_str().unwrap(), "a", "--sentential", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["mode"], "sentential-pem-kuroda");
    assert_eq!(doc["verification"]["mismatches"], 0);

    // Non-tree cone rejects sentential mode.
    let diamond = write_temp(
        &dir,
        "diamond.json",
        r#"{
          "signature": {"kind": "propositional", "atoms": ["p"]},
          "nodes": ["a", "l", "r", "t"],
          "edges": [["a", "l"], ["a", "r"], ["l", "t"], ["r", "t"]],
          "atoms": {"t": ["p"]}
        }"#,
    );
    let out = kripke(&["localize", diamond.to_str().unwrap(), "a", "--sentential"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tree"));
}

#[test]
fn translation_and_search_commands() {
    let out = kripke(&["friedman", "p -> q", "r"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "p | r -> q | r");

    let out = kripke(&["friedman", "_|_", "r"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "_|_ | r");

    let out = kripke(&["kuroda", "forall x. forall y. S(x, y)"]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "forall x. ~~(forall y. ~~S(x, y))"
    );

    let out = kripke(&["friedman", "p", "R(x)"]);
    assert_eq!(out.status.code(), Some(2), "open rho must be rejected");

    let out = kripke(&["krank", "p | ~p", "--max-nodes", "4", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["min_depth"], 1);
    assert_eq!(doc["exact"], true);

    let out = kripke(&["krank", "p -> p", "--max-nodes", "3"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("not refuted"));

    let out = kripke(&["krank", "forall x. R(x)", "--max-nodes", "3"]);
    assert_eq!(out.status.code(), Some(2), "first-order search is unsupported");
}

#[test]
fn prune_command() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_temp(&dir, "m.json", TWO_CHAIN);
    let out = kripke(&["prune", model.to_str().unwrap(), "p | ~p", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["nodes"], serde_json::json!(["a"]));

    // Identity pruning by _|_.
    let out = kripke(&["prune", model.to_str().unwrap(), "_|_"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("kept 2 of 2"));

    // Everything forces p at the single node where p holds.
    let single = write_temp(
        &dir,
        "single.json",
        r#"{"signature": {"kind": "propositional", "atoms": ["p"]},
            "nodes": ["a"], "edges": [], "atoms": {"a": ["p"]}}"#,
    );
    let out = kripke(&["prune", single.to_str().unwrap(), "p"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fuzz_is_deterministic() {
    let run = || {
        let out = kripke(&["fuzz", "--seed", "9", "--iters", "40", "--suite", "pruning"]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        String::from_utf8_lossy(&out.stdout).to_string()
    };
    let first = run();
    let second = run();
    assert_eq!(first, second);
    assert!(first.contains("failures=0"));

    let out = kripke(&["fuzz", "--seed", "1", "--iters", "5", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}
