use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::polyfield::FieldSpec;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0xF1E1D5;
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(name = "ffrmf", version, about = "Random multiplicative functions over F_q[t]")]
struct Cli {
    /// TOML file with default values; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record wall-clock timings in the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// Exact counts |P_k(n)| against the Hardy-Ramanujan bound.
    Table(TableArgs),
    /// Monte Carlo sample of the normalized sum.
    Sample(SampleArgs),
    /// Exact identity and inequality checks on small instances.
    Verify(VerifyArgs),
    /// Key lemma and three-sums bounds from exact counts.
    Bounds(BoundsArgs),
    /// Sathe-Selberg comparison and factorial tail sums.
    Asymp(AsympArgs),
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long)]
    q: Option<u64>,
    /// Sweep: `3`, `1..6` (inclusive) or `2,4,8`. Default: every k <= n.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Restrict to largest factor degree d.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_parser = parse_u64)]
    seed: Option<u64>,
    /// CSV of the normalized samples, one per trial.
    #[arg(long, value_name = "FILE")]
    dump_samples: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Only the pair (d, e) of the square lemma.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    e: Option<usize>,
    /// GCD bound parameters.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long = "check", alias = "what", value_enum)]
    checks: Vec<Check>,
    /// Cap on enumerated objects (assignments, pairs, polynomials).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args, Debug)]
struct AsympArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long, alias = "n-sweep")]
    n: Option<String>,
    /// Truncation degree of the Euler product.
    #[arg(long = "trunc")]
    truncation: Option<usize>,
    /// Factorial tail sums for these m.
    #[arg(long)]
    m: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// DP counts against factoring every polynomial.
    Counts,
    /// E[S] = 0 and E[S^2] = |P_k(n)| over all sign assignments.
    Variance,
    /// The square lemma for every (d, e).
    Lemma,
    /// Conditional means of each S_d vanish.
    Martingale,
    /// Normalization and the two negligibility ratios.
    Mcleish,
    /// The GCD pair bound (needs t and l).
    Gcd,
    /// Shorthand for `variance` plus `martingale`.
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Table,
    Sample,
    Verify,
    Bounds,
    Asymp,
}

/// A sweep value as written in a config file.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Int(u64),
    List(Vec<u64>),
    Text(String),
}

/// Everything a config file may set. Flags fill the same shape and take
/// precedence field by field.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub q: Option<u64>,
    pub k: Option<SweepValue>,
    pub n: Option<SweepValue>,
    pub d: Option<usize>,
    pub e: Option<usize>,
    pub r: Option<usize>,
    pub t: Option<usize>,
    pub l: Option<usize>,
    pub m: Option<SweepValue>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub truncation: Option<usize>,
    pub budget: Option<u64>,
    pub checks: Option<Vec<Check>>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub dump_samples: Option<PathBuf>,
    pub threads: Option<usize>,
    pub timings: Option<bool>,
}

impl PartialConfig {
    fn overlay(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            q: self.q.or(base.q),
            k: self.k.or(base.k),
            n: self.n.or(base.n),
            d: self.d.or(base.d),
            e: self.e.or(base.e),
            r: self.r.or(base.r),
            t: self.t.or(base.t),
            l: self.l.or(base.l),
            m: self.m.or(base.m),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            truncation: self.truncation.or(base.truncation),
            budget: self.budget.or(base.budget),
            checks: self.checks.or(base.checks),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            dump_samples: self.dump_samples.or(base.dump_samples),
            threads: self.threads.or(base.threads),
            timings: self.timings.or(base.timings),
        }
    }
}

/// The effective configuration of one run. Serializing it gives the
/// config echo; output plumbing (paths, threads, timings) is left out so
/// the echo depends only on what determines the results.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub q: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub dump_samples: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub timings: bool,
}

fn parse_u64(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("{s:?}: {e}"))
}

/// Parses `7`, `2..9` (inclusive), `2..=9` or `6,8,10`.
pub fn parse_sweep(field: &str, text: &str) -> Result<Vec<u64>, CliError> {
    let bad = |why: String| CliError::usage(format!("invalid value for {field}: {why}"));
    let text = text.trim();
    let num = |s: &str| s.trim().parse::<u64>().map_err(|e| bad(format!("{s:?}: {e}")));
    let values = if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        (a..=b).collect()
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad(format!("sweep {text:?} is empty")));
    }
    Ok(values)
}

fn sweep(field: &str, value: Option<&SweepValue>) -> Result<Vec<u64>, CliError> {
    match value {
        None => Ok(Vec::new()),
        Some(SweepValue::Int(v)) => Ok(vec![*v]),
        Some(SweepValue::List(v)) if v.is_empty() => {
            Err(CliError::usage(format!("invalid value for {field}: sweep is empty")))
        }
        Some(SweepValue::List(v)) => Ok(v.clone()),
        Some(SweepValue::Text(t)) => parse_sweep(field, t),
    }
}

fn positive_sweep(field: &str, value: Option<&SweepValue>, required: bool) -> Result<Vec<usize>, CliError> {
    let v = sweep(field, value)?;
    if v.is_empty() && required {
        return Err(CliError::usage(format!("missing required value for {field}")));
    }
    if let Some(bad) = v.iter().find(|&&x| x < 1) {
        return Err(CliError::usage(format!("invalid value for {field}: must be at least 1 (got {bad})")));
    }
    Ok(v.into_iter().map(|x| x as usize).collect())
}

fn text(v: Option<String>) -> Option<SweepValue> {
    v.map(SweepValue::Text)
}

fn load_file(path: &Path) -> Result<PartialConfig, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&raw).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}

/// Parses arguments (program name first) and an optional `--config` file
/// into the effective configuration.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::from_clap)?;
    let file = match &cli.config {
        Some(p) => load_file(p)?,
        None => PartialConfig::default(),
    };
    let global = PartialConfig {
        out: cli.out,
        format: cli.format,
        threads: cli.threads,
        timings: cli.timings.then_some(true),
        ..Default::default()
    };
    let (command, flags) = match cli.command {
        CommandArgs::Table(a) => (
            Command::Table,
            PartialConfig { q: a.q, k: text(a.k), n: text(a.n), d: a.d, ..Default::default() },
        ),
        CommandArgs::Sample(a) => (
            Command::Sample,
            PartialConfig {
                q: a.q,
                k: text(a.k),
                n: text(a.n),
                trials: a.trials,
                seed: a.seed,
                dump_samples: a.dump_samples,
                ..Default::default()
            },
        ),
        CommandArgs::Verify(a) => (
            Command::Verify,
            PartialConfig {
                q: a.q,
                k: text(a.k),
                n: text(a.n),
                d: a.d,
                e: a.e,
                t: a.t,
                l: a.l,
                checks: (!a.checks.is_empty()).then_some(a.checks),
                budget: a.budget,
                ..Default::default()
            },
        ),
        CommandArgs::Bounds(a) => (
            Command::Bounds,
            PartialConfig { q: a.q, k: text(a.k), n: text(a.n), r: a.r, ..Default::default() },
        ),
        CommandArgs::Asymp(a) => (
            Command::Asymp,
            PartialConfig {
                q: a.q,
                k: text(a.k),
                n: text(a.n),
                truncation: a.truncation,
                m: text(a.m),
                ..Default::default()
            },
        ),
    };
    resolve(command, flags.overlay(global).overlay(file))
}

/// Applies defaults and validation for `command`.
pub fn resolve(command: Command, p: PartialConfig) -> Result<RunConfig, CliError> {
    let q = p.q.ok_or_else(|| CliError::usage("missing required value for q"))?;
    FieldSpec::with_order(q).map_err(|e| CliError::usage(format!("invalid value for q: {e}")))?;
    if p.threads == Some(0) {
        return Err(CliError::usage("invalid value for threads: must be at least 1"));
    }
    let mut cfg = RunConfig {
        command,
        q,
        k: Vec::new(),
        n: Vec::new(),
        d: None,
        e: None,
        r: None,
        t: None,
        l: None,
        m: Vec::new(),
        trials: None,
        seed: None,
        truncation: None,
        budget: None,
        checks: Vec::new(),
        format: p.format.unwrap_or(Format::Json),
        out: p.out,
        dump_samples: None,
        threads: p.threads,
        timings: p.timings.unwrap_or(false),
    };
    let csv_ok = matches!(command, Command::Table | Command::Bounds | Command::Asymp);
    if cfg.format == Format::Csv && !csv_ok {
        return Err(CliError::usage("invalid value for format: csv is only available for table, bounds and asymp"));
    }
    match command {
        Command::Table => {
            cfg.n = positive_sweep("n", p.n.as_ref(), true)?;
            cfg.k = positive_sweep("k", p.k.as_ref(), false)?;
            if cfg.k.is_empty() {
                cfg.k = (1..=*cfg.n.iter().max().unwrap()).collect();
            }
            cfg.d = p.d;
        }
        Command::Sample => {
            cfg.k = positive_sweep("k", p.k.as_ref(), true)?;
            cfg.n = positive_sweep("n", p.n.as_ref(), true)?;
            if cfg.k.len() != 1 || cfg.n.len() != 1 {
                return Err(CliError::usage("sample takes a single k and a single n"));
            }
            let trials = p.trials.unwrap_or(DEFAULT_TRIALS);
            if trials == 0 {
                return Err(CliError::usage("invalid value for trials: must be at least 1"));
            }
            cfg.trials = Some(trials);
            cfg.seed = Some(p.seed.unwrap_or(DEFAULT_SEED));
            cfg.dump_samples = p.dump_samples;
        }
        Command::Verify => {
            cfg.k = positive_sweep("k", p.k.as_ref(), true)?;
            cfg.n = positive_sweep("n", p.n.as_ref(), true)?;
            cfg.d = p.d;
            cfg.e = p.e.or(p.d);
            cfg.t = p.t;
            cfg.l = p.l;
            cfg.budget = p.budget;
            let mut checks = p.checks.unwrap_or_else(|| {
                let mut c = vec![Check::Counts, Check::Lemma, Check::Mcleish];
                if p.t.is_some() && p.l.is_some() {
                    c.push(Check::Gcd);
                }
                c
            });
            if checks.contains(&Check::Exhaustive) {
                checks.retain(|&c| c != Check::Exhaustive);
                checks.extend([Check::Variance, Check::Martingale]);
            }
            checks.sort();
            checks.dedup();
            if checks.contains(&Check::Gcd) && (cfg.t.is_none() || cfg.l.is_none()) {
                return Err(CliError::usage("the gcd check needs both t and l"));
            }
            cfg.checks = checks;
        }
        Command::Bounds => {
            cfg.k = positive_sweep("k", p.k.as_ref(), true)?;
            cfg.n = positive_sweep("n", p.n.as_ref(), true)?;
            let r = p.r.unwrap_or(2);
            if r < 1 {
                return Err(CliError::usage("invalid value for r: must be at least 1"));
            }
            cfg.r = Some(r);
        }
        Command::Asymp => {
            cfg.m = sweep("m", p.m.as_ref())?.into_iter().map(|m| m as u32).collect();
            let need_kn = cfg.m.is_empty();
            cfg.k = positive_sweep("k", p.k.as_ref(), need_kn)?;
            cfg.n = positive_sweep("n", p.n.as_ref(), need_kn)?;
            if cfg.k.is_empty() != cfg.n.is_empty() {
                return Err(CliError::usage("asymp needs both k and n, or neither"));
            }
            if let Some(bad) = cfg.n.iter().find(|&&n| n < 2) {
                return Err(CliError::usage(format!("invalid value for n: must be at least 2 (got {bad})")));
            }
            let trunc = p.truncation.unwrap_or(crate::asymptotics::DEFAULT_TRUNCATION);
            if trunc < 1 {
                return Err(CliError::usage("invalid value for truncation: must be at least 1"));
            }
            cfg.truncation = Some(trunc);
        }
    }
    Ok(cfg)
}
