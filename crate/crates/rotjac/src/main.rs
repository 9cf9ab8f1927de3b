use std::process::ExitCode;

use clap::Parser;
use rotjac::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("rotjac: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
