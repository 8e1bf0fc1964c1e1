//! `warpmean`: command-line front end for structural-expectation
//! registration.

mod args;
mod commands;
mod manifest;
mod svg;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("warpmean: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
