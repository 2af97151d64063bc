use std::process::ExitCode;

use clap::Parser;
use robustcover_cli::{run, Cli, SEED_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match std::env::var(SEED_ENV) {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                eprintln!("input error: {SEED_ENV}={s} is not an unsigned integer");
                return ExitCode::from(2);
            }
        },
        Err(_) => None,
    };
    match run(&cli, seed) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
