use std::process::ExitCode;

use clap::Parser;
use llrcal::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("llrcal: {e}");
            ExitCode::from(exit_code(e.kind()) as u8)
        }
    }
}
