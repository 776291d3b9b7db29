//! `glod` — benchmarks and diagnostics for graph-level outlier detection on
//! down-sampled graph-classification datasets.

mod commands;
mod manifest;
mod opts;

use std::process::ExitCode;

use clap::Parser;

use opts::Cli;

/// Exit 2 marks a usage error (mirrors clap's own parse failures); exit 1
/// marks a runtime failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(glod_core::Error),
}

impl From<glod_core::Error> for CliError {
    fn from(e: glod_core::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(glod_core::Error::Io(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // a second build_global in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
