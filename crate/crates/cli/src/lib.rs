//! The `channelpx` command line: `price`, `curve` and `verify` over a JSON
//! config with flag overrides.
//!
//! Exit codes: 0 success, 1 bad arguments or config, 2 inputs outside a
//! pricer's domain, 3 a verification check failed. Errors are written to
//! standard error as one JSON object.

pub mod args;
pub mod commands;
pub mod config;
pub mod engine;
pub mod error;
pub mod output;

use args::{Cli, Command, Overrides};
use clap::error::ErrorKind;
use clap::Parser;
use config::{Purpose, RunConfig};
use error::{CliError, EXIT_OK, EXIT_VERIFY};
use std::ffi::OsString;
use std::io::Write;

/// Resolve the config named by `--config` (if any) under the flag overrides.
pub fn load(flags: &Overrides, purpose: Purpose) -> Result<RunConfig, CliError> {
    let text = match &flags.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
            CliError::Parse(format!("cannot read config {}: {e}", path.display()))
        })?),
        None => None,
    };
    config::resolve(text.as_deref(), flags, purpose)
}

/// Run one invocation; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
        Err(e) => return fail(err, &CliError::Parse(e.render().to_string().trim_end().to_string())),
    };
    let outcome = match cli.command {
        Command::Price(flags) => {
            load(&flags, Purpose::Price).and_then(|c| commands::price::run(&c, out)).map(|_| true)
        }
        Command::Curve(flags) => {
            load(&flags, Purpose::Curve).and_then(|c| commands::curve::run(&c, out)).map(|_| true)
        }
        Command::Verify { suite, overrides } => load(&overrides, Purpose::Verify(suite))
            .and_then(|c| commands::verify::run(&c, suite, out)),
    };
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(e) => fail(err, &e),
    }
}

fn fail(err: &mut dyn Write, e: &CliError) -> i32 {
    let _ = writeln!(err, "{}", e.to_json());
    e.exit_code()
}
