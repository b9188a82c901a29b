//! The `langlogic` command line.
//!
//! Exit status: 0 success, 1 validation findings, 2 parse or I/O errors
//! (including malformed arguments), 3 no proof found.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::assertion::{parse_assertion, Assertion};
use crate::prover::{prove, render_tree_text, saturate, ProofResult, ProverConfig};
use crate::syntax::{parse_language_unchecked, validate_language, LanguageDef};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_PROOF: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "langlogic",
    version,
    about = "Derive and prove assertions about language definitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a language definition
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List every assertion derivable from the precondition
    Derive {
        file: PathBuf,
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Prove a goal assertion and print the derivation
    Prove {
        file: PathBuf,
        /// Goal assertion, e.g. "ctx-compliant([BETA])"
        #[arg(long)]
        goal: String,
        #[command(flatten)]
        opts: AnalysisOpts,
    },
}

#[derive(Args, Debug)]
struct AnalysisOpts {
    /// Precondition assertion
    #[arg(long, default_value = "true")]
    pre: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Comma-separated ineffectual metavariables, replacing the file's directive
    #[arg(long)]
    ineffectual: Option<String>,
    /// Maximum passes over the inference system
    #[arg(long)]
    max_passes: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl AnalysisOpts {
    fn config(&self) -> ProverConfig {
        ProverConfig {
            max_passes: self.max_passes,
            ineffectual: self.ineffectual.as_deref().map(parse_ineffectual),
        }
    }
}

fn parse_ineffectual(list: &str) -> BTreeSet<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<LanguageDef, Error> {
    crate::syntax::parse_language(&read(path)?)
}

fn assertion(text: &str) -> Result<Assertion, Error> {
    let a = parse_assertion(text)?;
    crate::assertion::atoms_of(&a)?;
    Ok(a)
}

fn json_line(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

/// Runs the command line on `args` (program name first), writing results
/// to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "langlogic: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut impl Write) -> Result<i32, Error> {
    let io = |source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match command {
        Command::Check { file, format } => {
            let lang = parse_language_unchecked(&read(&file)?)?;
            let report = validate_language(&lang);
            let text = match format {
                Format::Text if report.is_empty() => "ok\n".to_string(),
                Format::Text => format!("{report}\n"),
                Format::Json => {
                    let findings: Vec<String> = report.findings.iter().map(ToString::to_string).collect();
                    json_line(&serde_json::json!({ "valid": report.is_empty(), "findings": findings }))
                }
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(if report.is_empty() { EXIT_OK } else { EXIT_VALIDATION })
        }
        Command::Derive { file, opts } => {
            let lang = load(&file)?;
            let pre = assertion(&opts.pre)?;
            let sat = saturate(&lang, &pre, &opts.config())?;
            let text = match opts.format {
                Format::Text => sat.atoms.iter().map(|a| format!("{a}\n")).collect(),
                Format::Json => {
                    let atoms: Vec<_> = sat.atoms.iter().collect();
                    json_line(&serde_json::json!({ "atoms": atoms }))
                }
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Prove { file, goal, opts } => {
            let lang = load(&file)?;
            let pre = assertion(&opts.pre)?;
            let goal = assertion(&goal)?;
            let (text, code) = match prove(&lang, &pre, &goal, &opts.config())? {
                ProofResult::Proved(tree) => (
                    match opts.format {
                        Format::Text => render_tree_text(&tree),
                        Format::Json => json_line(&tree),
                    },
                    EXIT_OK,
                ),
                ProofResult::NoProof(report) => (
                    match opts.format {
                        Format::Text => report.to_string(),
                        Format::Json => json_line(&report),
                    },
                    EXIT_NO_PROOF,
                ),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(code)
        }
    }
}
