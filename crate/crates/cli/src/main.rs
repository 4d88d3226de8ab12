//! `milrt`: tests, imputation and simulation studies from the command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 unreadable input or invalid
//! configuration, 3 data that the requested method or imputer cannot handle.

mod impute;
mod simulate;
mod test_cmd;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "milrt", version, about = "Hypothesis tests on multiply imputed data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pool a test over completed datasets.
    Test(test_cmd::TestArgs),
    /// Write completed datasets for an incomplete data file.
    Impute(impute::ImputeArgs),
    /// Run a simulation study described by a JSON config.
    Simulate(simulate::SimulateArgs),
    /// Tail rates of the limiting null statistic under two F approximations.
    Nulldist(simulate::NulldistArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl fmt::Display) -> Self {
        Self { code: 2, message: message.to_string() }
    }

    pub fn incompatible(message: impl fmt::Display) -> Self {
        Self { code: 3, message: message.to_string() }
    }
}

/// Errors from the computation itself; unreadable input is reported
/// through [`Failure::input`] before this point.
impl From<milrt::Error> for Failure {
    fn from(e: milrt::Error) -> Self {
        let code = match e {
            milrt::Error::Unsupported(_) | milrt::Error::Incompatible(_) => 3,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

pub fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure { code: 1, message: format!("{}: {e}", dir.display()) })?;
    }
    std::fs::write(path, contents).map_err(|e| Failure { code: 1, message: format!("{}: {e}", path.display()) })
}

pub fn print_json<T: serde::Serialize>(doc: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    emit(&(text + "\n"))
}

/// Write to stdout; a reader that hung up early is not an error.
pub fn emit(text: &str) -> Result<(), Failure> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure { code: 1, message: format!("stdout: {e}") }),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Test(a) => test_cmd::run(a),
        Command::Impute(a) => impute::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Nulldist(a) => simulate::run_nulldist(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("milrt: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
