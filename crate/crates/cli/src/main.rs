use std::process::ExitCode;

use clap::Parser;

use qwalk_cli::{configure_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let invocation = std::env::args().collect::<Vec<_>>().join(" ");
    let result = configure_threads().and_then(|_| run(&cli, &invocation));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
