//! Golden corpus shared by the CLI tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
pub struct Case {
    pub name: String,
    pub args: Vec<String>,
    pub instance: String,
    pub exit: i32,
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub fn manifest() -> Vec<Case> {
    let text = std::fs::read_to_string(golden_dir().join("manifest.json")).expect("manifest present");
    serde_json::from_str(&text).expect("manifest parses")
}

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
}

/// Runs the built `omega` binary on a golden case.
pub fn run_binary(case: &Case) -> Run {
    let output = Command::new(env!("CARGO_BIN_EXE_omega"))
        .args(&case.args)
        .arg(golden_dir().join("instances").join(&case.instance))
        .output()
        .expect("binary runs");
    Run { code: output.status.code().expect("exited normally"), stdout: output.stdout }
}
