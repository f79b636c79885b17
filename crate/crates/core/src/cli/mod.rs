//! Command-line front end: `table`, `sample`, `verify`, `bounds`, `asymp`.

mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

pub use config::{parse_config, parse_sweep, resolve, Check, Command, Format, PartialConfig, RunConfig, SweepValue};
pub use config::{DEFAULT_SEED, DEFAULT_TRIALS};
pub use report::{emit_report, Report, Timings};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn from_clap(e: clap::Error) -> Self {
        use clap::error::ErrorKind;
        let code = match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                EXIT_OK
            }
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.render().to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// What a subcommand produced: the `results` value, an optional CSV
/// rendering, and whether every assertion it makes held.
pub struct Outcome {
    pub results: serde_json::Value,
    pub csv: Option<String>,
    pub passed: bool,
}

/// Runs one configured experiment.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let run = || commands::dispatch(cfg);
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::usage(format!("cannot start {t} threads: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Full CLI behaviour; returns the process exit code. The report goes to
/// `stdout` unless `--out` is given; diagnostics go to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match try_run(argv, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let out: &mut dyn Write = if e.code == EXIT_OK { stdout } else { stderr };
            let msg = e.message.trim_end();
            let _ = if e.code == EXIT_OK {
                writeln!(out, "{msg}")
            } else {
                writeln!(out, "error: {}", msg.strip_prefix("error: ").unwrap_or(msg))
            };
            e.code
        }
    }
}

fn try_run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = parse_config(argv)?;
    let start = Instant::now();
    let outcome = execute(&cfg)?;
    let timings = cfg.timings.then(|| Timings {
        elapsed_seconds: start.elapsed().as_secs_f64(),
    });
    let doc = emit_report(&cfg, &outcome, timings)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, doc)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?,
        None => stdout
            .write_all(doc.as_bytes())
            .map_err(|e| CliError::usage(format!("cannot write report: {e}")))?,
    }
    if outcome.passed {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(stderr, "verification failed");
        Ok(EXIT_VERIFICATION)
    }
}
