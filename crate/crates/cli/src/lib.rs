//! The `kst` command line: argument parsing, the config schema, subcommand
//! bodies and the exit-code contract (0 pass, 2 uncertified, 1 error).

pub mod args;
pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

pub use config::{Budgets, CommandConfig, Subcommand};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Plan(#[from] kst_core::graphs::PlanError),
    #[error(transparent)]
    Graph(#[from] kst_core::graphs::GraphError),
    #[error(transparent)]
    Indep(#[from] kst_core::independence::IndepError),
    #[error(transparent)]
    Geom(#[from] kst_core::projgeom::GeomError),
    #[error(transparent)]
    Field(#[from] kst_core::gfarith::FieldError),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Parses and runs one invocation, printing the result document to `out`
/// and diagnostics to `err`; returns the process exit code.
pub fn dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if informational { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return if informational { EXIT_PASS } else { EXIT_ERROR };
        }
    };
    let config = CommandConfig::from(cli);
    match execute(&config) {
        Ok(outcome) => {
            for line in &outcome.log {
                let _ = writeln!(err, "{line}");
            }
            let text = commands::pretty(&outcome.document);
            let written = match (&config.out, config.subcommand) {
                (Some(path), sub) if sub != Subcommand::Construct => write_atomic(path, text.as_bytes()),
                _ => Ok(()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_ERROR;
            }
            let _ = out.write_all(text.as_bytes());
            if outcome.pass {
                EXIT_PASS
            } else {
                EXIT_UNCERTIFIED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn execute(config: &CommandConfig) -> Result<commands::Outcome, CliError> {
    config.validate()?;
    match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(|| commands::run(config)),
        None => commands::run(config),
    }
}

pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    dispatch_to(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}
