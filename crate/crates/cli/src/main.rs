mod commands;
mod config;
mod sweep;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = commands::Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            // 2 = bad input, 3 = numerical failure.
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
