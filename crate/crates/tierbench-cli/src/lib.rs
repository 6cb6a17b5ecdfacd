//! Command-line front end for the `tierbench` library.
//!
//! Exit status is 0 on success, 1 when validation produced `fail` findings
//! and 2 for usage, input or parse errors.

pub mod args;
mod commands;
mod config;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use commands::{load_model, Status};
pub use config::CATALOG_ENV;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub fn execute(cli: &Cli) -> tierbench::Result<Status> {
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Predict(a) => commands::predict(a),
        Command::Ingest(a) => commands::ingest(a),
        Command::Validate(a) => commands::validate(a),
        Command::Stats(a) => commands::stats(a),
        Command::Pareto(a) => commands::pareto(a),
        Command::Report(a) => commands::report(a),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::Failures) => EXIT_FAILURES,
        Err(e) => {
            eprintln!("tierbench: error: {e}");
            EXIT_USAGE
        }
    }
}
