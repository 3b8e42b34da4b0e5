use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use ehcr_cli::app::{run, Cli, EXIT_CONFIG};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                // Bad arguments are configuration errors, not clap's default 2.
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    ExitCode::from(run(&cli))
}
