use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use super::config::{Check, Command, RunConfig};
use super::{CliError, Outcome};
use crate::asymptotics::{factorial_tail_check, sathe_selberg_from_count, AsymptoticComparison, FactorialTail};
use crate::bounds::{key_lemma_rhs, BoundReport, BoundsEngine};
use crate::counting::{count_pk, count_pk_by_maxdeg, hr_bound, CountTable, HR_BOUND_REL_TOL};
use crate::error::{Error, Result};
use crate::montecarlo::Support;
use crate::numeric::{self, biguint_le, ln_biguint, LogReal, HR_SHIFT};
use crate::oracle::{
    brute_count_by_omega, conditional_mean_check, exhaustive_moments, verify_gcd_bound, McLeishReport, MomentReport,
    OracleContext, DEFAULT_ASSIGNMENT_BUDGET, DEFAULT_CENSUS_BUDGET, DEFAULT_FACTOR_BUDGET,
};
use crate::polyfield::cache::{load_or_build, CACHE_DIR_ENV};
use crate::polyfield::{FieldSpec, IrredTable};

/// Terms summed by the factorial tail check.
pub const TAIL_TERMS: u64 = 1_000_000;

pub(super) fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    Ok(match cfg.command {
        Command::Table => table(cfg)?,
        Command::Sample => sample(cfg)?,
        Command::Verify => verify(cfg)?,
        Command::Bounds => bounds(cfg)?,
        Command::Asymp => asymp(cfg)?,
    })
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn irred_table(q: u64, max_degree: usize) -> Result<IrredTable> {
    let field = FieldSpec::with_order(q)?;
    let dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from);
    load_or_build(&field, max_degree, dir.as_deref())
}

#[derive(Serialize)]
struct TableRow {
    q: u64,
    k: usize,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(with = "numeric::decimal")]
    count: BigUint,
    hr_bound: LogReal,
    ratio: f64,
    within_bound: bool,
}

fn table(cfg: &RunConfig) -> Result<Outcome> {
    let q = cfg.q;
    let k_max = *cfg.k.iter().max().unwrap();
    let n_max = *cfg.n.iter().max().unwrap();
    let counts = CountTable::new(q, k_max, n_max);
    let mut rows = Vec::new();
    for &n in &cfg.n {
        for &k in cfg.k.iter().filter(|&&k| k <= n) {
            let count = match cfg.d {
                Some(d) => count_pk_by_maxdeg(q, k, n, d),
                None => counts.count(k, n),
            };
            let bound = hr_bound(q, k, n);
            let ratio = if count.is_zero() { 0.0 } else { (ln_biguint(&count) - bound.ln).exp() };
            rows.push(TableRow {
                q,
                k,
                n,
                d: cfg.d,
                within_bound: biguint_le(&count, &bound, HR_BOUND_REL_TOL),
                count,
                hr_bound: bound,
                ratio,
            });
        }
    }
    let mut csv = String::new();
    match cfg.d {
        Some(_) => csv.push_str("q,k,n,d,count,hr_bound,ratio\n"),
        None => csv.push_str("q,k,n,count,hr_bound,ratio\n"),
    }
    for r in &rows {
        let _ = write!(csv, "{},{},{},", r.q, r.k, r.n);
        if let Some(d) = r.d {
            let _ = write!(csv, "{d},");
        }
        let _ = writeln!(csv, "{},{},{:e}", r.count, r.hr_bound.to_sci_string(), r.ratio);
    }
    let passed = rows.iter().all(|r| r.within_bound);
    Ok(Outcome {
        results: json!({ "rows": to_value(&rows), "all_within_bound": passed }),
        csv: Some(csv),
        passed,
    })
}

fn sample(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (k, n) = (cfg.k[0], cfg.n[0]);
    let support = Support::from_table(irred_table(cfg.q, n)?, k, n)?;
    let exp = support.run(cfg.trials.unwrap(), cfg.seed.unwrap())?;
    if let Some(path) = &cfg.dump_samples {
        let mut csv = String::from("trial,value\n");
        for (i, x) in exp.samples.iter().enumerate() {
            let _ = writeln!(csv, "{i},{x}");
        }
        std::fs::write(path, csv).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Outcome {
        results: to_value(&exp.stats),
        csv: None,
        passed: true,
    })
}

#[derive(Serialize)]
struct CountsCheck {
    #[serde(with = "numeric::decimal")]
    dp: BigUint,
    brute: u64,
    #[serde(with = "numeric::decimal")]
    squarefree_total: BigUint,
    #[serde(with = "numeric::decimal")]
    squarefree_expected: BigUint,
    holds: bool,
}

#[derive(Serialize)]
struct Instance {
    k: usize,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<CountsCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variance: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    martingale: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lemma: Option<Vec<MomentReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mcleish: Option<McLeishReport>,
    passed: bool,
}

fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let q = cfg.q;
    let has = |c: Check| cfg.checks.contains(&c);
    let mut brute_cache: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let mut instances = Vec::new();
    for &n in &cfg.n {
        for &k in &cfg.k {
            let mut inst = Instance {
                k,
                n,
                counts: None,
                variance: None,
                martingale: None,
                lemma: None,
                mcleish: None,
                passed: true,
            };
            let pk = count_pk(q, k, n);
            if has(Check::Counts) {
                if !brute_cache.contains_key(&n) {
                    let budget = cfg.budget.unwrap_or(DEFAULT_FACTOR_BUDGET);
                    brute_cache.insert(n, brute_count_by_omega(q, n, budget)?);
                }
                let hist = &brute_cache[&n];
                let brute = hist.get(k).copied().unwrap_or(0);
                let squarefree_total: BigUint = hist.iter().map(|&c| BigUint::from(c)).sum();
                let qn = BigUint::from(q).pow(n as u32);
                let squarefree_expected = if n >= 2 { &qn - &qn / q } else { qn };
                let holds = pk == BigUint::from(brute) && squarefree_total == squarefree_expected;
                inst.passed &= holds;
                inst.counts = Some(CountsCheck {
                    dp: pk.clone(),
                    brute,
                    squarefree_total,
                    squarefree_expected,
                    holds,
                });
            }
            if pk.is_zero() {
                instances.push(inst);
                continue;
            }
            let assignment_budget = cfg.budget.unwrap_or(DEFAULT_ASSIGNMENT_BUDGET);
            if has(Check::Variance) {
                let m = exhaustive_moments(q, k, n, assignment_budget)?;
                let holds = m.mean.is_zero() && m.second == pk.clone().into();
                inst.passed &= holds;
                inst.variance = Some(json!({ "moments": to_value(&m), "holds": holds }));
            }
            if has(Check::Martingale) {
                let worst = conditional_mean_check(q, k, n, assignment_budget)?;
                let holds = worst.iter().all(|&(_, w)| w == 0);
                inst.passed &= holds;
                let per_d: Vec<_> = worst.iter().map(|&(d, w)| json!({ "d": d, "worst_abs": w })).collect();
                inst.martingale = Some(json!({ "per_d": per_d, "holds": holds }));
            }
            if has(Check::Lemma) || (has(Check::Mcleish) && k >= 2) {
                let census = cfg.budget.map_or(DEFAULT_CENSUS_BUDGET, |b| b.min(usize::MAX as u64) as usize);
                let mut ctx = OracleContext::from_table(irred_table(q, n)?, k, n, census);
                if has(Check::Lemma) {
                    let mut reports = ctx.verify_square_lemma()?;
                    if let Some(d) = cfg.d {
                        let e = cfg.e.unwrap_or(d);
                        reports.retain(|r| r.d == d && r.e == e);
                    }
                    inst.passed &= reports.iter().all(|r| r.holds);
                    inst.lemma = Some(reports);
                }
                if has(Check::Mcleish) && k >= 2 {
                    let r = ctx.mcleish_report()?;
                    inst.passed &= r.c1_is_one;
                    inst.mcleish = Some(r);
                }
            }
            instances.push(inst);
        }
    }
    let gcd = if has(Check::Gcd) {
        let budget = cfg.budget.map(|b| b.min(usize::MAX as u64) as usize);
        Some(verify_gcd_bound(q, cfg.t.unwrap(), cfg.l.unwrap(), budget)?)
    } else {
        None
    };
    let passed = instances.iter().all(|i| i.passed) && gcd.as_ref().is_none_or(|g| g.holds);
    Ok(Outcome {
        results: json!({ "instances": to_value(&instances), "gcd": to_value(&gcd), "passed": passed }),
        csv: None,
        passed,
    })
}

#[derive(Serialize)]
struct BoundsRow {
    q: u64,
    k: usize,
    n: usize,
    r: usize,
    #[serde(with = "numeric::decimal")]
    key_lemma_lhs: BigUint,
    key_lemma_rhs: Option<LogReal>,
    /// `log(LHS) - log(RHS)`.
    log_ratio: Option<f64>,
    /// Whether `r <= k <= (1/3) log n`, the range the lemma covers.
    in_range: bool,
    /// `log_ratio <= log 10`, asserted only in range.
    within_constant: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(with = "opt_decimal")]
    i_chain: Option<BigUint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(with = "opt_decimal")]
    j_chain: Option<BigUint>,
    three_sums: Option<BoundReport>,
}

mod opt_decimal {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => crate::numeric::decimal::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

/// The constant the key lemma's ratio is checked against.
pub const KEY_LEMMA_CONSTANT: f64 = 10.0;

fn bounds(cfg: &RunConfig) -> Result<Outcome> {
    let q = cfg.q;
    let r = cfg.r.unwrap_or(2);
    let k_max = *cfg.k.iter().max().unwrap();
    let n_max = *cfg.n.iter().max().unwrap();
    let counts = CountTable::new(q, k_max, n_max);
    let profiles = if k_max >= 2 {
        match CountTable::with_profiles(q, k_max, n_max) {
            Ok(t) => Some(t),
            Err(Error::Budget { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let mut engine = BoundsEngine::new(&counts);
    let mut profile_engine = profiles.as_ref().map(BoundsEngine::new);
    let mut rows = Vec::new();
    for &n in &cfg.n {
        for &k in &cfg.k {
            let lhs = engine.key_lemma_lhs(r, k, n)?;
            let rhs = if r <= k && n >= 2 { Some(key_lemma_rhs(q, r, k, n)?) } else { None };
            let log_ratio = match (&rhs, lhs.is_zero()) {
                (Some(rhs), false) => Some(ln_biguint(&lhs) - rhs.ln),
                _ => None,
            };
            let in_range = n >= 2 && r <= k && (k as f64) <= (n as f64).ln() / 3.0;
            let within_constant = in_range.then(|| log_ratio.is_none_or(|x| x <= KEY_LEMMA_CONSTANT.ln()));
            let (i_chain, j_chain) = if k >= 2 {
                (Some(engine.i_chain_bound(k, n)?), Some(engine.j_chain_bound(k, n)?))
            } else {
                (None, None)
            };
            let three_sums = match profile_engine.as_mut() {
                Some(pe) if k >= 2 && n >= 2 => Some(pe.three_sums_report(k, n)?),
                _ => None,
            };
            rows.push(BoundsRow {
                q,
                k,
                n,
                r,
                key_lemma_lhs: lhs,
                key_lemma_rhs: rhs,
                log_ratio,
                in_range,
                within_constant,
                i_chain,
                j_chain,
                three_sums,
            });
        }
    }
    let mut csv = String::from("q,k,n,r,log_ratio,in_range,i_chain,j_chain,three_sums_ratio\n");
    let opt = |x: &Option<BigUint>| x.as_ref().map(|v| v.to_string()).unwrap_or_default();
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            row.q,
            row.k,
            row.n,
            row.r,
            row.log_ratio.map(|x| x.to_string()).unwrap_or_default(),
            row.in_range,
            opt(&row.i_chain),
            opt(&row.j_chain),
            row.three_sums.as_ref().map(|t| t.ratio.to_string()).unwrap_or_default(),
        );
    }
    let passed = rows.iter().all(|r| r.within_constant != Some(false));
    Ok(Outcome {
        results: json!({
            "rows": to_value(&rows),
            "key_lemma_constant": KEY_LEMMA_CONSTANT,
            "profiles_available": profiles.is_some(),
            "passed": passed,
        }),
        csv: Some(csv),
        passed,
    })
}

fn asymp(cfg: &RunConfig) -> Result<Outcome> {
    let q = cfg.q;
    let trunc = cfg.truncation.unwrap_or(crate::asymptotics::DEFAULT_TRUNCATION);
    let mut comparisons: Vec<AsymptoticComparison> = Vec::new();
    if !cfg.k.is_empty() {
        let k_max = *cfg.k.iter().max().unwrap();
        let n_max = *cfg.n.iter().max().unwrap();
        let counts = CountTable::new(q, k_max, n_max);
        for &n in &cfg.n {
            for &k in &cfg.k {
                let c = counts.count(k, n);
                if c.is_zero() {
                    continue;
                }
                comparisons.push(sathe_selberg_from_count(q, k, n, &c, trunc)?);
            }
        }
    }
    let tails: Vec<FactorialTail> =
        cfg.m.iter().map(|&m| factorial_tail_check(m, HR_SHIFT, TAIL_TERMS)).collect::<Result<_>>()?;
    let mut csv = String::new();
    if !comparisons.is_empty() {
        csv.push_str("q,k,n,exact_log,predicted_log,relative_deviation,g,tail_bound\n");
        for c in &comparisons {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                c.q, c.k, c.n, c.exact_log, c.predicted_log, c.relative_deviation, c.g.value, c.g.tail_bound
            );
        }
    }
    if !tails.is_empty() {
        if !csv.is_empty() {
            csv.push('\n');
        }
        csv.push_str("m,c,terms,sum,ratio\n");
        for t in &tails {
            let _ = writeln!(csv, "{},{},{},{},{}", t.m, t.c, t.terms, t.sum, t.ratio_to_m_factorial);
        }
    }
    Ok(Outcome {
        results: json!({ "comparisons": to_value(&comparisons), "factorial_tails": to_value(&tails) }),
        csv: Some(csv),
        passed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_config;

    fn run(args: &[&str]) -> Outcome {
        let mut argv = vec!["ffrmf"];
        argv.extend_from_slice(args);
        dispatch(&parse_config(argv).unwrap()).unwrap()
    }

    #[test]
    fn table_csv_header() {
        let o = run(&["table", "--q", "2", "--k", "1..3", "--n", "3..5"]);
        let csv = o.csv.unwrap();
        assert!(csv.starts_with("q,k,n,count,hr_bound,ratio\n"));
        assert!(csv.contains("\n2,2,3,2,"));
        assert!(o.passed);
    }

    #[test]
    fn verify_worked_instance() {
        let o = run(&["verify", "--q", "2", "--k", "2", "--n", "3", "--d", "2", "--e", "2", "--check", "lemma"]);
        let lemma = &o.results["instances"][0]["lemma"][0];
        assert_eq!(lemma["mixed"], "8");
        assert_eq!(lemma["holds"], true);
        assert!(o.passed);
    }

    #[test]
    fn variance_check() {
        let o = run(&["verify", "--q", "2", "--k", "2", "--n", "5", "--check", "variance", "--check", "martingale"]);
        assert!(o.passed);
        assert_eq!(o.results["instances"][0]["variance"]["holds"], true);
    }

    #[test]
    fn squarefree_total_identity() {
        let o = run(&["verify", "--q", "3", "--k", "1..4", "--n", "5", "--check", "counts"]);
        assert!(o.passed);
        assert_eq!(o.results["instances"][0]["counts"]["squarefree_expected"], "162");
    }
}
