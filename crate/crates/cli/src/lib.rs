//! Argument parsing and subcommand implementations behind the `chainmeter` binary.

pub mod args;
pub mod commands;

use std::io::Write;

use clap::Parser;

use args::Cli;
use commands::{CommandError, EXIT_USAGE};

/// Parses a full command line (program name first) and runs it, writing the report to `out`.
/// Help and version requests count as usage errors here; the binary handles them itself.
pub fn invoke<I, T>(argv: I, out: &mut dyn Write) -> Result<(), CommandError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CommandError {
        code: EXIT_USAGE,
        message: e.to_string(),
    })?;
    commands::run(cli.command, out)
}
