mod common;

use std::io::Write;

use common::{fixture, run_cli};

fn temp_universe(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run_path(path: &std::path::Path, args: &[&str]) -> common::Run {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_segal-dyn"))
        .arg("--universe")
        .arg(path)
        .args(args)
        .env_remove("SEGALDYN_MAX")
        .output()
        .unwrap();
    common::Run {
        code: out.status.code().unwrap(),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

#[test]
fn clean_universe_exits_zero() {
    let run = run_cli("minimal.json", &["validate"], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["violations"], serde_json::json!([]));
    assert_eq!(report["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn dangling_identifier_exits_two() {
    let run = run_cli("dangling.json", &["validate"], &[]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("unknown identifier `g`"), "{}", run.stderr);
    assert!(run.stdout.is_empty());
}

#[test]
fn law_violation_exits_four() {
    let run = run_cli("broken.json", &["validate"], &[]);
    assert_eq!(run.code, 4);
    let report: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["violations"][0]["law"], "left_unit");
    assert_eq!(
        run_cli(
            "bad_psi.json",
            &[
                "der",
                "--state",
                "K",
                "--base",
                "cx",
                "--direction",
                "id",
                "--target",
                "cy"
            ],
            &[]
        )
        .code,
        4
    );
}

#[test]
fn capacity_exits_three() {
    assert_eq!(run_cli("tangent.json", &["end"], &[]).code, 0);
    let run = run_cli("tangent.json", &["--max", "2", "end"], &[]);
    assert_eq!(run.code, 3, "{}", run.stderr);
    assert!(run.stderr.contains("capacity"), "{}", run.stderr);
    assert_eq!(run_cli("tangent.json", &["end"], &[("SEGALDYN_MAX", "2")]).code, 3);
}

#[test]
fn malformed_input_exits_two() {
    let missing = run_path(&fixture("no_such_file.json"), &["validate"]);
    assert_eq!(missing.code, 2);
    let bad = temp_universe("{\n  \"laws\": {\n    \"A\" [\"a\"]\n  }\n}");
    let run = run_path(bad.path(), &["validate"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("line 3"), "{}", run.stderr);
    let dup = temp_universe(r#"{"laws": {"A": ["a"], "A": ["b"]}}"#);
    let run = run_path(dup.path(), &["validate"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("duplicate identifier `A`"), "{}", run.stderr);
}

#[test]
fn failed_split_names_the_node() {
    let run = run_cli("strings.json", &["strings", "split", "e:a", "B:y"], &[]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("B:y"), "{}", run.stderr);
}

#[test]
fn timing_is_opt_in() {
    let plain = run_cli("flow.json", &["flow", "--start", "a"], &[]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("timing_ms"));
    let timed = run_cli("flow.json", &["--timing", "flow", "--start", "a"], &[]);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("timing_ms"));
}

#[test]
fn flow_reports_trajectory_and_verdict() {
    let run = run_cli("flow.json", &["flow", "--start", "a"], &[]);
    let report: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(
        report["result"]["trajectory"],
        serde_json::json!(["a", "a", "b", "c", "c"])
    );
    assert_eq!(report["result"]["verdict"]["kind"], "fixed");
    let swap = run_cli("swap.json", &["flow", "--start", "a"], &[]);
    let report: serde_json::Value = serde_json::from_slice(&swap.stdout).unwrap();
    assert_eq!(report["result"]["verdict"]["period"], 2);
}
