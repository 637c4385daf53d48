use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = cobundle::cli::RunConfig::parse();
    match cobundle::cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
