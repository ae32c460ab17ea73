use std::process::ExitCode;

use clap::Parser;
use modelkit_cli::{run, Cli, RunError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli.command) {
        Ok(report) => report,
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(RunError::Failed(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    let text = report.render();
    match cli.command.report_path() {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => print!("{text}"),
    }
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(diagnostic) => {
            eprintln!("diagnostic failed: {}", diagnostic.describe());
            ExitCode::FAILURE
        }
    }
}
