#![allow(dead_code)]

pub mod oracle;
pub mod tamper;

use std::path::PathBuf;
use std::process::Command;

use langlogic::syntax::{parse_language, LanguageDef};

pub const VARIANTS: [&str; 5] = [
    "lambda-div-print-faulty",
    "lambda-div-print-fixed1",
    "lambda-div-print-fixed2",
    "lambda-div-print-fixed3",
    "lambda-div-print-fixed4",
];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.lan"))
}

pub fn corpus_source(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

pub fn corpus(name: &str) -> LanguageDef {
    parse_language(&corpus_source(name)).unwrap()
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the compiled binary.
pub fn langlogic(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_langlogic"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Runs the command line in process.
pub fn run_in_process(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("langlogic").chain(args.iter().copied());
    let code = langlogic::cli::run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}
