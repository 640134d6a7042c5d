//! `framekit` command-line front end.
//!
//! Exit status: 0 success, 2 invalid input, 3 violated mathematical
//! precondition, 4 I/O failure.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use framekit::{Error, ErrorCategory};

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Validation => 2,
        ErrorCategory::Precondition => 3,
        ErrorCategory::Io => 4,
    }
}

fn execute(cli: &args::Cli) -> Result<(), Error> {
    let (emitted, format, out) = commands::run(&cli.command)?;
    let text = emitted.render(format)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let start = Instant::now();
    let result = execute(&cli);
    let elapsed = start.elapsed().as_secs_f64();
    match result {
        Ok(()) => {
            eprintln!("{}", serde_json::json!({ "wall_time_s": elapsed }));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.code(), "message": e.to_string() }));
            ExitCode::from(exit_code(&e))
        }
    }
}
