use serde::Serialize;

use super::config::{Format, RunConfig};
use super::{CliError, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub elapsed_seconds: f64,
}

/// Top-level JSON document. `timings` is `null` unless requested, so that
/// repeated runs produce identical bytes.
#[derive(Serialize)]
pub struct Report<'a> {
    pub tool_version: &'static str,
    pub config: &'a RunConfig,
    pub results: &'a serde_json::Value,
    pub exact_integers_as_decimal_strings: bool,
    pub timings: Option<Timings>,
}

/// Renders the report in the configured format.
pub fn emit_report(cfg: &RunConfig, outcome: &Outcome, timings: Option<Timings>) -> Result<String, CliError> {
    match cfg.format {
        Format::Csv => outcome
            .csv
            .clone()
            .ok_or_else(|| CliError::usage("this subcommand has no csv output")),
        Format::Json => {
            let report = Report {
                tool_version: env!("CARGO_PKG_VERSION"),
                config: cfg,
                results: &outcome.results,
                exact_integers_as_decimal_strings: true,
                timings,
            };
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::usage(format!("cannot serialize report: {e}")))?;
            s.push('\n');
            Ok(s)
        }
    }
}
