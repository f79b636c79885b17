use std::process::Command;

use ffrmf::cli::{self, EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ffrmf").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn rejects_non_prime_power_field() {
    let (code, out, err) = run(&["table", "--q", "6", "--n", "4"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("q must be a prime power"), "{err}");
}

#[test]
fn unknown_flag_is_usage_error() {
    let (code, _, err) = run(&["table", "--q", "2", "--bogus", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bogus"));
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("sample"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "q = 2\nk = 1\nn = 6\ntrials = 1000\nseed = 7\n").unwrap();
    let p = path.to_str().unwrap();
    let from_file = json(&["sample", "--config", p]);
    assert_eq!(from_file["config"]["trials"], 1000);
    assert_eq!(from_file["results"]["trials"], 1000);
    let overridden = json(&["sample", "--config", p, "--trials", "100000"]);
    assert_eq!(overridden["config"]["trials"], 100000);
    assert_eq!(overridden["config"]["seed"], 7);
    assert_eq!(overridden["results"]["trials"], 100000);
}

#[test]
fn unknown_config_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "q = 2\nwidth = 3\n").unwrap();
    let (code, _, _) = run(&["table", "--config", path.to_str().unwrap(), "--n", "3"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn table_csv_layout() {
    let (code, out, _) = run(&["table", "--q", "2", "--k", "2", "--n", "4..6", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("q,k,n,count,hr_bound,ratio"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 3);
    // |P_2(4)| over F_2: {1,3} gives 2*2 = 4, {2,2} is impossible with one quadratic.
    assert!(rows[0].starts_with("2,2,4,4,"), "{}", rows[0]);
}

#[test]
fn csv_rejected_for_sample() {
    let (code, _, _) = run(&["sample", "--q", "2", "--k", "1", "--n", "5", "--format", "csv"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn exact_counts_are_decimal_strings() {
    let v = json(&["table", "--q", "3", "--k", "2", "--n", "30"]);
    assert_eq!(v["exact_integers_as_decimal_strings"], true);
    assert!(v["results"]["rows"][0]["count"].is_string());
    assert!(v["timings"].is_null());
}

#[test]
fn verify_reports_each_pair() {
    let v = json(&["verify", "--q", "2", "--k", "2", "--n", "6", "--d", "2", "--e", "3", "--check", "lemma"]);
    let lemma = v["results"]["instances"][0]["lemma"].as_array().unwrap();
    assert_eq!(lemma.len(), 1);
    for r in lemma {
        assert!(r["d"].is_u64() && r["e"].is_u64());
        assert!(r["holds"].is_boolean());
        assert!(r["mixed"].is_string());
    }
    assert_eq!(v["results"]["passed"], true);
}

#[test]
fn failing_lemma_exits_with_verification_code() {
    let (code, out, err) = run(&["verify", "--q", "2", "--k", "2", "--n", "4", "--d", "3", "--e", "3", "--check", "lemma"]);
    assert_eq!(code, EXIT_VERIFICATION);
    assert!(err.contains("verification failed"));
    let v: Value = serde_json::from_str(&out).unwrap();
    let r = &v["results"]["instances"][0]["lemma"][0];
    assert_eq!(r["mixed"], "64");
    assert_eq!(r["holds"], false);
}

#[test]
fn budget_overflow_exit_code() {
    let (code, _, err) = run(&["verify", "--q", "2", "--k", "2", "--n", "10", "--check", "variance", "--budget", "16"]);
    assert_eq!(code, EXIT_BUDGET, "{err}");
}

#[test]
fn what_alias_and_exhaustive() {
    let v = json(&["verify", "--q", "2", "--k", "2", "--n", "5", "--what", "exhaustive"]);
    assert_eq!(v["config"]["checks"], serde_json::json!(["variance", "martingale"]));
    let inst = &v["results"]["instances"][0];
    assert_eq!(inst["variance"]["holds"], true);
    assert_eq!(inst["martingale"]["holds"], true);
}

#[test]
fn gcd_check_runs() {
    let v = json(&["verify", "--q", "2", "--k", "1", "--n", "3", "--check", "gcd", "--t", "2", "--l", "3"]);
    assert_eq!(v["results"]["gcd"]["holds"], true);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["sample", "--q", "3", "--k", "2", "--n", "6", "--trials", "2000", "--seed", "0x2a"];
    let (_, stdout, _) = run(&args);
    let mut with_out: Vec<&str> = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let (code, printed, _) = run(&with_out);
    assert_eq!(code, EXIT_OK);
    assert!(printed.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn dump_samples_writes_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let (code, _, _) = run(&[
        "sample", "--q", "2", "--k", "2", "--n", "7", "--trials", "50", "--dump-samples", path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("trial,value"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn asymp_and_bounds_produce_rows() {
    let a = json(&["asymp", "--q", "2", "--k", "2", "--n", "100", "--trunc", "30"]);
    assert!(a["results"].to_string().contains("relative_deviation"));
    let b = json(&["bounds", "--q", "2", "--k", "2", "--n", "12"]);
    assert!(b["results"].to_string().contains("key_lemma_lhs"));
}

#[test]
fn binary_is_deterministic_with_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_ffrmf");
    let args = ["sample", "--q", "2", "--k", "2", "--n", "8", "--trials", "500"];
    let first = Command::new(bin).args(args).env("FFRMF_CACHE_DIR", dir.path()).output().unwrap();
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some(), "cache file not written");
    let second = Command::new(bin).args(args).env("FFRMF_CACHE_DIR", dir.path()).output().unwrap();
    assert_eq!(first.stdout, second.stdout);

    let bad = Command::new(bin).args(["table", "--q", "6", "--n", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
