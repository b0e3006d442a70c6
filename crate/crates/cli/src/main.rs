use std::io::{self, Write};
use std::process::ExitCode;

use clap::{ColorChoice, CommandFactory, FromArgMatches};

use chainmeter_cli::args::Cli;
use chainmeter_cli::commands;

fn main() -> ExitCode {
    let mut cmd = Cli::command();
    if std::env::var_os("CHAINMETER_NO_COLOR").is_some() {
        cmd = cmd.color(ColorChoice::Never);
    }
    let cli = match cmd
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(commands::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let status = commands::run(cli.command, &mut out);
    let _ = out.flush();
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chainmeter: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
