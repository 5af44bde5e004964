use std::process::ExitCode;

use clap::Parser;
use maxsat::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    match &cli.out {
        Some(path) if outcome.code != 2 => {
            if let Err(e) = std::fs::write(path, &outcome.report) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        _ if outcome.code == 2 => eprint!("{}", outcome.report),
        _ => print!("{}", outcome.report),
    }
    ExitCode::from(outcome.code as u8)
}
