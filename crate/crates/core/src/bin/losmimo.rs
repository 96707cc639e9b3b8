use std::process::ExitCode;

use clap::Parser;
use losmimo::cli::{run, CliConfig, Command, EXIT_VALIDATION};

fn main() -> ExitCode {
    let config = match CliConfig::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    // The regression checks deliberately probe near-field geometries.
    let level = match config.command {
        Command::Verify { .. } => "error",
        _ => "warn",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let mut stdout = std::io::stdout().lock();
    match run(&config, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("losmimo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
