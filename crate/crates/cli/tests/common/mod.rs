use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde::Deserialize;

#[derive(Debug, Deserialize)]
pub struct Case {
    pub name: String,
    pub args: Vec<String>,
    #[serde(default)]
    pub input: Option<String>,
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn cases() -> Vec<Case> {
    let text = std::fs::read_to_string(fixtures_dir().join("cases.json")).expect("cases.json");
    serde_json::from_str(&text).expect("cases.json parses")
}

pub fn lcausal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcausal"))
        .args(args)
        .current_dir(fixtures_dir())
        .output()
        .expect("lcausal runs")
}

pub fn run_case(case: &Case) -> Output {
    let mut args: Vec<&str> = case.args.iter().map(String::as_str).collect();
    if let Some(input) = &case.input {
        args.push("--input");
        args.push(input);
    }
    lcausal(&args)
}

pub fn expected_path(case: &Case) -> PathBuf {
    fixtures_dir().join(format!("{}.expected.json", case.name))
}
