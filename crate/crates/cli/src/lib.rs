//! Command-line front end: every analysis and simulation as a CSV-emitting
//! subcommand.
//!
//! Exit codes: 0 on success, 1 on a runtime or numeric failure, 2 on a usage
//! error.

mod args;
mod commands;

use std::fmt;

pub use args::{parse_args, Command, CommandSpec, Output, Parsed};
pub use commands::{render, run_command, RunError};

/// Invalid command line; reported as a single line and exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(String);

impl UsageError {
    pub fn new(message: impl Into<String>) -> Self {
        UsageError(message.into())
    }

    fn from_clap(e: &clap::Error) -> Self {
        let rendered = e.render().to_string();
        let line = rendered
            .lines()
            .find(|l| !l.trim().is_empty())
            .unwrap_or("invalid arguments")
            .trim_start_matches("error: ");
        UsageError(line.to_owned())
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<bb84_core::ModelError> for UsageError {
    fn from(e: bb84_core::ModelError) -> Self {
        UsageError(e.to_string())
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `argv`, runs the command and returns the process exit code.
/// Diagnostics go to stderr.
pub fn main_with_args<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    match parse_args(argv) {
        Ok(Parsed::Info(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Ok(Parsed::Run(spec)) => match run_command(&spec) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("bb84: {e}");
                EXIT_RUNTIME
            }
        },
        Err(e) => {
            eprintln!("bb84: {e}");
            EXIT_USAGE
        }
    }
}
