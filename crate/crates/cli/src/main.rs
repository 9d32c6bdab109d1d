//! `raagtk`: every library operation behind one binary with text or JSON
//! output. Exit codes: 0 success, 1 domain error, 2 usage error.

mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use commands::{Cli, CliError, Report};

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: Value,
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    schema: u32,
    error: &'a str,
    message: String,
}

/// Writes lines to stdout, stopping quietly if the reader has gone away.
fn emit(lines: &[String]) {
    let mut out = std::io::stdout().lock();
    for line in lines {
        if writeln!(out, "{line}").is_err() {
            return;
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match commands::run(&cli) {
        Ok(Report {
            command,
            text,
            body,
            success,
        }) => {
            if json {
                let env = Envelope {
                    schema: SCHEMA,
                    command: &command,
                    body,
                };
                emit(&[serde_json::to_string_pretty(&env).expect("serializable")]);
            } else {
                emit(&text);
            }
            if success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let env = ErrorEnvelope {
                schema: SCHEMA,
                error: e.code(),
                message: e.to_string(),
            };
            if json {
                emit(&[serde_json::to_string_pretty(&env).expect("serializable")]);
            } else {
                eprintln!("error[{}]: {}", env.error, env.message);
            }
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
