//! `building-walks` — batch reports for random walks on rank-2 incidence
//! geometries and the C̃₂ vertex lattice.
//!
//! Exit codes: 0 success, 1 computation/domain failure (a JSON error object is
//! written to stderr), 2 usage problems (unknown flags, missing parameters,
//! unparseable config files — clap prints its own diagnostics for the first
//! kind and also exits 2).

mod commands;
mod config;
mod emit;

use clap::Parser;

/// Everything that can end a run unsuccessfully, split by exit code.
pub enum CliError {
    /// Bad invocation: missing/invalid parameters or config. Exit 2.
    Usage(String),
    /// The library rejected the computation. Exit 1, machine-readable.
    Computation(building_walks::Error),
    /// Failed to read or write report data. Exit 1, machine-readable.
    Io(String),
}

impl From<building_walks::Error> for CliError {
    fn from(e: building_walks::Error) -> Self {
        CliError::Computation(e)
    }
}

fn error_object(kind: &str, message: &str) -> String {
    serde_json::json!({
        "error": { "kind": kind, "message": message },
        "library_version": building_walks::report::library_version(),
    })
    .to_string()
}

fn main() {
    let cli = config::Cli::parse();
    match commands::run(&cli.command) {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            eprintln!("run `building-walks --help` for the flag reference");
            std::process::exit(2);
        }
        Err(CliError::Computation(err)) => {
            eprintln!("{}", error_object(err.kind(), &err.to_string()));
            std::process::exit(1);
        }
        Err(CliError::Io(msg)) => {
            eprintln!("{}", error_object("io", &msg));
            std::process::exit(1);
        }
    }
}
