//! Front end for the `iitaka` binary: argument grammar, command execution,
//! reports and the search cache.
//!
//! Exit codes: 0 when every check in the report matched, 1 when one did not,
//! 2 for usage or input errors.

pub mod args;
pub mod cache;
pub mod commands;
pub mod emit;
pub mod expected;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::Parser;

use crate::args::Cli;
use crate::report::{Report, Status, EXIT_USAGE};

/// Parses `argv` (program name first) and runs the command without writing
/// the report anywhere.
pub fn execute_args<I, T>(argv: I) -> Result<Report, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Ok(commands::execute(&Cli::try_parse_from(argv)?))
}

/// Parses `argv`, runs the command and writes the report to stdout or
/// `--out`. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let report = commands::execute(&cli);
    if report.status == Status::Error {
        eprintln!("iitaka: {}", report.error_message().unwrap_or("error"));
    }
    let text = emit::render(&report, cli.output.emit);
    let written = match &cli.output.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("iitaka: cannot write report: {e}");
        return EXIT_USAGE;
    }
    report.status.exit_code()
}
