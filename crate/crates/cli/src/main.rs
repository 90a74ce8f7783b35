use std::process::ExitCode;

use bslab_cli::cli::Cli;
use bslab_cli::{exit, exit_code, run};
use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run::execute(&cli.command) {
        Ok(true) => ExitCode::from(exit::PASS as u8),
        Ok(false) => ExitCode::from(exit::CHECK_FAILED as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
