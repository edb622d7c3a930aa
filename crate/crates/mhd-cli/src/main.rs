use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = mhd_cli::Cli::parse();
    match mhd_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mhd: {e}");
            ExitCode::from(e.code())
        }
    }
}
