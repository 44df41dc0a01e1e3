use std::process::ExitCode;

use clap::Parser;
use raimi::cli::{exit_code, report_error, run, Cli, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::from_cli(Cli::parse());
    let outcome = run(&config);
    if let Err(err) = &outcome {
        report_error(err);
    }
    ExitCode::from(exit_code(&outcome))
}
