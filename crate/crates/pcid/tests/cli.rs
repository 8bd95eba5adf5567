//! End-to-end tests of the `pcid` binary: exit codes, JSON shapes, and
//! output determinism.

use std::path::Path;
use std::process::{Command, Output};

use pcid::admg::{VertexId, VertexSet};
use pcid::families::{self, FamilyRequest};
use pcid::ident::{validate_hedge, Hedge};

fn pcid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcid"))
        .args(args)
        .env_remove("PCID_MAX_WINDOW")
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write_family(dir: &Path, kind: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("{kind}.pcg"));
    let path_str = path.to_str().unwrap().to_owned();
    let mut args = vec!["family", kind];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["-o", &path_str]);
    let out = pcid(&args);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path_str
}

#[test]
fn id_unidentifiable_report_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "fig2", &[]);
    let out = pcid(&[
        "id", "--graph", &graph, "--do", "1@1", "--on", "2@2", "--lookback", "full",
    ]);
    assert_eq!(exit_code(&out), 10);
    let report = stdout_json(&out);
    assert_eq!(report["decision"], "unidentifiable");
    assert_eq!(report["label"], "proved");
    assert_eq!(report["mode"], "full");
    assert_eq!(report["window"], serde_json::json!([0, 2]));

    // the reported witness deserializes and still validates
    let h: Hedge = serde_json::from_value(report["witness"].clone()).unwrap();
    let g = families::generate(&FamilyRequest::Fig2)
        .unwrap()
        .unroll((0, 2))
        .unwrap();
    let x = VertexSet::singleton(VertexId::new(1, 1));
    let y = VertexSet::singleton(VertexId::new(2, 2));
    assert_eq!(validate_hedge(&g, &x, &y, &h), vec![]);
}

#[test]
fn id_short_lookback_is_heuristic_and_identifiable() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "fig2", &[]);
    let out = pcid(&[
        "id", "--graph", &graph, "--do", "1@1", "--on", "2@2", "--lookback", "0",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["decision"], "identifiable");
    assert_eq!(report["label"], "heuristic");
    assert!(report["witness"].is_null() || report.get("witness").is_none());
}

#[test]
fn overlapping_query_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "fig2", &[]);
    let out = pcid(&["id", "--graph", &graph, "--do", "1@1", "--on", "1@1"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn window_budget_refusal_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "fig2", &[]);
    let out = Command::new(env!("CARGO_BIN_EXE_pcid"))
        .args([
            "id", "--graph", &graph, "--do", "1@100", "--on", "2@101", "--lookback", "full",
        ])
        .env("PCID_MAX_WINDOW", "10")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn all_shifts_finds_the_g7_failure() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "gw", &["--w", "7"]);
    let out = pcid(&[
        "all-shifts", "--graph", &graph, "--do", "0@0", "--on", "6@0",
        "--c-override", "7", "--jobs", "2",
    ]);
    assert_eq!(exit_code(&out), 10);
    let report = stdout_json(&out);
    assert_eq!(report["failing_delta"], 5);
    assert_eq!(report["all_identifiable"], false);
    assert_eq!(report["shifts_checked"], 7);
    assert!(report["witness"].is_object());
}

#[test]
fn all_shifts_without_override_refuses_when_c_is_huge() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "gw", &["--w", "7"]);
    let out = pcid(&["all-shifts", "--graph", &graph, "--do", "0@0", "--on", "6@0"]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn all_shifts_rejects_zero_override() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "fig2", &[]);
    let out = pcid(&[
        "all-shifts", "--graph", &graph, "--do", "1@1", "--on", "2@1",
        "--c-override", "0",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn oracle_lists_the_unique_fig2_hedge() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "fig2", &[]);
    let out = pcid(&[
        "oracle", &graph, "--do", "1@1", "--on", "2@2", "--window", "0:2",
    ]);
    assert_eq!(exit_code(&out), 0);
    let hedges = stdout_json(&out);
    let arr = hedges.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    let h: Hedge = serde_json::from_value(arr[0].clone()).unwrap();
    assert_eq!(h.roots, VertexSet::singleton(VertexId::new(2, 2)));
    assert_eq!(h.f_vertices.len(), 4);
}

#[test]
fn oracle_size_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "fig2", &[]);
    let out = pcid(&[
        "oracle", &graph, "--do", "1@1", "--on", "2@9", "--window", "0:9",
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn min_lookback_fig2_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "fig2", &[]);
    let out = pcid(&["min-lookback", &graph, "--do", "1@1", "--on", "2@2"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_json(&out), serde_json::json!({ "lookback": 1 }));
}

#[test]
fn export_dot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_family(dir.path(), "gw", &["--w", "7"]);
    let run = || pcid(&["export-dot", &graph, "--window", "0:1"]);
    let (a, b) = (run(), run());
    assert_eq!(exit_code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let dot = String::from_utf8(a.stdout).unwrap();
    assert!(dot.matches(";\n").count() >= 14);
    assert!(dot.contains("\"0@0\""));
    assert!(dot.contains("dir=both, style=dashed"));
    assert!(dot.starts_with("digraph"));
}

#[test]
fn family_stdout_parses_back() {
    let out = pcid(&["family", "fig3"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let spec = pcid::periodic::PeriodicSpec::parse(&text).unwrap();
    assert_eq!(spec, families::generate(&FamilyRequest::Fig3).unwrap());
}

#[test]
fn family_rejects_unknown_kind() {
    let out = pcid(&["family", "petersen"]);
    assert_eq!(exit_code(&out), 2);
}
