//! End-to-end tests of the `primegraph` binary: JSON schema stability,
//! exit codes, and determinism of the emitted artifacts.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};
use tempfile::NamedTempFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_primegraph"))
}

fn tree_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

#[test]
fn embed_edge_tree_prime() {
    let f = tree_file("2\n1 2\n");
    let out = run(&["embed", "--tree", f.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["q"], "385");
    assert_eq!(json["moduli"], serde_json::json!([5, 7, 11]));
    assert_eq!(json["residues"], serde_json::json!(["134", "197"]));
    assert_eq!(json["labels"], serde_json::json!(["519", "1352"]));
    assert_eq!(json["verified"], true);
    assert_eq!(json["manifest"]["subcommand"], "embed");
}

#[test]
fn embed_edge_tree_coprime() {
    let f = tree_file("2\n1 2\n");
    let out = run(&[
        "embed",
        "--tree",
        f.path().to_str().unwrap(),
        "--target",
        "coprime",
    ]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["labels"], serde_json::json!(["134", "197"]));
    assert_eq!(json["n"], "384");
}

#[test]
fn embed_output_schema_stable() {
    let f = tree_file("4\n1 2\n2 3\n3 4\n");
    let json = stdout_json(&run(&["embed", "--tree", f.path().to_str().unwrap()]));
    assert_eq!(
        keys(&json),
        [
            "codes",
            "d",
            "labels",
            "m",
            "manifest",
            "max_label",
            "moduli",
            "n",
            "q",
            "residues",
            "target",
            "trace",
            "verified"
        ]
    );
    assert_eq!(
        keys(&json["manifest"]),
        ["config", "input_digest", "subcommand", "version"]
    );
    // big integers travel as decimal strings
    assert!(json["q"].is_string());
    assert!(json["labels"].as_array().unwrap().iter().all(Value::is_string));
    assert!(json["max_label"].is_string());
}

#[test]
fn embed_malformed_file_exits_2() {
    let f = tree_file("3\n1 2\nnot an edge\n");
    let out = run(&["embed", "--tree", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "diagnostic names the line: {err}");
}

#[test]
fn embed_missing_file_exits_2() {
    let out = run(&["embed", "--tree", "/nonexistent/tree.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn embed_tiny_budget_exits_3() {
    let f = tree_file("4\n1 2\n2 3\n3 4\n");
    let out = run(&[
        "embed",
        "--tree",
        f.path().to_str().unwrap(),
        "--budget",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn embed_deterministic_across_runs() {
    let f = tree_file("6\n1 2\n2 3\n2 4\n4 5\n4 6\n");
    let a = run(&["embed", "--tree", f.path().to_str().unwrap()]);
    let b = run(&["embed", "--tree", f.path().to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-identical JSON");
}

#[test]
fn embed_writes_dot() {
    let f = tree_file("3\n1 2\n2 3\n");
    let dot = NamedTempFile::new().unwrap();
    let out = run(&[
        "embed",
        "--tree",
        f.path().to_str().unwrap(),
        "--dot",
        dot.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dot.path()).unwrap();
    assert!(text.starts_with("graph {"));
    assert!(text.contains("--"), "has tree edges: {text}");
    assert!(text.contains("1:"), "vertices labeled v:j_v: {text}");
}

#[test]
fn verify_ok_path4() {
    let f = tree_file("4\n1 2\n2 3\n3 4\n");
    let out = run(&[
        "verify",
        "--tree",
        f.path().to_str().unwrap(),
        "--labels",
        "1,2,3,8",
        "--n",
        "8",
    ]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["ok"], true);
    assert_eq!(json["violations"], serde_json::json!([]));
    assert_eq!(
        keys(&json),
        ["m", "manifest", "n", "ok", "violations"]
    );
}

#[test]
fn verify_mismatch_exits_1() {
    let f = tree_file("4\n1 2\n2 3\n3 4\n");
    let out = run(&[
        "verify",
        "--tree",
        f.path().to_str().unwrap(),
        "--labels",
        "1,2,3,4",
        "--n",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["ok"], false);
    let v = &json["violations"][0];
    assert_eq!(v["kind"], "mismatch");
    assert_eq!(v["vertices"], serde_json::json!([1, 4]));
    assert_eq!(v["sum"], "5");
}

#[test]
fn verify_duplicate_labels_exit_1() {
    let f = tree_file("3\n1 2\n2 3\n");
    let out = run(&[
        "verify",
        "--tree",
        f.path().to_str().unwrap(),
        "--labels",
        "1,2,1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["violations"][0]["kind"], "duplicate");
}

#[test]
fn verify_coprime_requires_q() {
    let f = tree_file("2\n1 2\n");
    let out = run(&[
        "verify",
        "--tree",
        f.path().to_str().unwrap(),
        "--labels",
        "134,197",
        "--target",
        "coprime",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let with_q = run(&[
        "verify",
        "--tree",
        f.path().to_str().unwrap(),
        "--labels",
        "134,197",
        "--target",
        "coprime",
        "--q",
        "385",
    ]);
    assert!(with_q.status.success());
}

#[test]
fn oracle_small_values() {
    for (n, expect) in [("1", 1u64), ("3", 3), ("4", 3)] {
        let out = run(&["oracle", "--n", n, "--max-m", "4"]);
        assert!(out.status.success());
        let json = stdout_json(&out);
        assert_eq!(json["m_universal"], expect, "n={n}");
        assert_eq!(
            keys(&json),
            ["m_universal", "manifest", "max_m", "n", "trees"]
        );
    }
}

#[test]
fn oracle_lists_per_tree_witnesses() {
    let out = run(&["oracle", "--n", "4", "--max-m", "4"]);
    let json = stdout_json(&out);
    let trees = json["trees"].as_array().unwrap();
    // sizes 1..4 contribute 1 + 1 + 1 + 2 representatives
    assert_eq!(trees.len(), 5);
    let star4 = trees
        .iter()
        .find(|t| t["m"] == 4 && t["canonical"].as_str().unwrap().contains("()()()"))
        .expect("the 4-star is tabulated");
    assert!(star4["labels"].is_null(), "no witness in P_4: {star4}");
    // the m=3 representative has center 1, so the witness pairs 1 with the
    // two labels 2 and 4 (sums 3 and 5 prime, 2+4 composite)
    let path3 = trees
        .iter()
        .find(|t| t["m"] == 3)
        .expect("the 3-path is tabulated");
    assert_eq!(path3["labels"], serde_json::json!(["1", "2", "4"]));
}

#[test]
fn stats_prime_small() {
    let out = run(&["stats", "--kind", "prime", "--n", "4"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["average_degree"], 2.0);
    assert_eq!(json["edge_count"], 4);
    assert_eq!(json["exact"], true);
    assert_eq!(json["bipartite"], true);
    assert_eq!(
        keys(&json),
        [
            "average_degree",
            "bipartite",
            "edge_count",
            "exact",
            "kind",
            "manifest",
            "n",
            "q",
            "std_error"
        ]
    );

    let trivial = stdout_json(&run(&["stats", "--kind", "prime", "--n", "1"]));
    assert_eq!(trivial["average_degree"], 0.0);
}

#[test]
fn stats_coprime_needs_q() {
    let out = run(&["stats", "--kind", "coprime", "--n", "385"]);
    assert_eq!(out.status.code(), Some(2));
    let ok = run(&["stats", "--kind", "coprime", "--n", "385", "--q", "385"]);
    assert!(ok.status.success());
    let json = stdout_json(&ok);
    assert_eq!(json["exact"], true);
    assert!(json["average_degree"].as_f64().unwrap() > 0.0);
}

#[test]
fn gen_tree_round_trips() {
    let out = run(&["gen-tree", "--m", "9", "--seed", "42"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let t = primegraph::tree::parse_tree(&text).unwrap();
    assert_eq!(t.vertex_count(), 9);
    // same seed, same tree
    let again = run(&["gen-tree", "--m", "9", "--seed", "42"]);
    assert_eq!(text.as_bytes(), &again.stdout[..]);
    let other = run(&["gen-tree", "--m", "9", "--seed", "43"]);
    assert_ne!(text.as_bytes(), &other.stdout[..]);
}

#[test]
fn json_flag_writes_file_instead_of_stdout() {
    let f = tree_file("2\n1 2\n");
    let json_out = NamedTempFile::new().unwrap();
    let out = run(&[
        "embed",
        "--tree",
        f.path().to_str().unwrap(),
        "--json",
        json_out.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(json_out.path()).unwrap()).unwrap();
    assert_eq!(json["labels"], serde_json::json!(["519", "1352"]));
}
