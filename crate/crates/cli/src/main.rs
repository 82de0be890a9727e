use std::process::ExitCode;

use clap::Parser;

use qmd_cli::{execute, render, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = execute(&cli);
    if let Some(message) = outcome.report.get("error").and_then(|e| e.as_str()) {
        eprintln!("error: {message}");
        if cli.json {
            print!("{}", render(&cli, &outcome));
        }
    } else {
        print!("{}", render(&cli, &outcome));
    }
    if outcome.status == Status::ConditionFailed && !cli.json {
        eprintln!("condition not satisfied");
    }
    ExitCode::from(outcome.status as u8)
}
