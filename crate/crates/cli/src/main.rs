use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;
use doshap_cli::args::Cli;
use doshap_cli::{configure_threads, execute, CliError};

fn fail(err: &CliError) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(&err.to_json()).expect("error object serialises"));
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::parse(e.to_string().trim_end())),
    };
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
