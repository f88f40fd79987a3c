mod args;
mod commands;
mod error;
mod grid;
mod output;
mod selftest;
mod setup;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, EXIT_USAGE};

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Curve(a) => commands::curve(a),
        Command::Verify(a) => verify::verify(a),
        Command::Scan(a) => verify::scan(a),
        Command::Selftest(a) => selftest::selftest(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.reason_json());
            e.exit()
        }
    }
}
