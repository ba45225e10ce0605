use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = snnq::cli::Args::parse();
    match snnq::cli::main_with(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
