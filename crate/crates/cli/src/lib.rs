//! Command-line front end of the dmax laboratory: seeded experiments with
//! self-describing CSV/SVG artifacts and the invariant suite.

pub mod args;
pub mod commands;
pub mod meta;
pub mod plot;
pub mod verify;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unknown ids or unreadable artifacts.
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Failed(String),

    #[error(transparent)]
    Core(#[from] dmax_core::DmaxError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 1 on failures, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: --workers must be positive");
            return 2;
        }
        // A pool may already exist when run is called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match commands::dispatch(cli.command, cli.deterministic) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
