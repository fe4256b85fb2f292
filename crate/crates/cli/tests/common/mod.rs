#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// `(golden file stem, fixture, arguments after --universe)`.
pub const GOLDEN: &[(&str, &str, &[&str])] = &[
    ("validate_minimal", "minimal.json", &["validate"]),
    ("validate_broken", "broken.json", &["validate"]),
    ("validate_braket", "braket.json", &["validate"]),
    ("validate_bad_psi", "bad_psi.json", &["validate"]),
    ("end_flow", "flow.json", &["end"]),
    ("end_tangent", "tangent.json", &["end"]),
    ("flow_chain", "flow.json", &["flow", "--start", "a"]),
    ("flow_swap", "swap.json", &["flow", "--start", "a"]),
    (
        "flow_chain_text",
        "flow.json",
        &["--format", "text", "flow", "--start", "c"],
    ),
    ("dmatrix_q", "quantum.json", &["dmatrix", "--state", "q"]),
    (
        "dmatrix_q_set",
        "quantum.json",
        &["dmatrix", "--state", "q", "--set-mode"],
    ),
    ("quantum", "quantum.json", &["quantum"]),
    (
        "der_psi",
        "tangent.json",
        &[
            "der",
            "--state",
            "Psi",
            "--base",
            "cx",
            "--direction",
            "id",
            "--target",
            "cy",
            "--cubic",
        ],
    ),
    ("cusp_psi", "tangent.json", &["cusp", "--state", "Psi", "--base", "cx"]),
    ("gencat_check", "gencat.json", &["gencat", "check"]),
    (
        "lift_up",
        "braket.json",
        &["lift", "--state-map", "up", "--operator", "uF"],
    ),
    ("strings_build", "strings.json", &["strings", "build"]),
    ("strings_join", "strings.json", &["strings", "join", "e:a", "f:x"]),
    ("strings_split", "strings.json", &["strings", "split", "e:a", "C:p"]),
    (
        "strings_push",
        "strings.json",
        &["strings", "push", "--stack", "F", "e:a"],
    ),
    (
        "strings_shift",
        "strings.json",
        &["strings", "shift", "--state", "z", "--stack", "F", "e:a"],
    ),
];

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> PathBuf {
    manifest_dir().join("tests/fixtures").join(name)
}

pub fn golden(stem: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(format!("{stem}.out"))
}

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

pub fn run_cli(fixture_name: &str, args: &[&str], envs: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_segal-dyn"));
    cmd.arg("--universe").arg(fixture(fixture_name)).args(args);
    cmd.env_remove("SEGALDYN_MAX");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn fixtures() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(manifest_dir().join("tests/fixtures"))
        .expect("fixtures dir")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    out.sort();
    out
}
