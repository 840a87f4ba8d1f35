use std::process::Command;

use serde_json::Value;
use zecklab_cli::{run_with, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, EXIT_VIOLATION};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("zecklab").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_zecklab"));
    c.env_remove("ZECKLAB_CONFIG");
    c
}

fn temp_path(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("zecklab-cli-{}-{name}", std::process::id()))
}

#[test]
fn sz_prints_digit_sum() {
    assert_eq!(call(&["sz", "100"]), (EXIT_OK, "3\n".to_string(), String::new()));
}

#[test]
fn expand_zero_is_empty() {
    let (code, out, _) = call(&["expand", "0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "");
    assert_eq!(call(&["expand", "100"]).1, "11 6 4\n");
}

#[test]
fn residue_json_counts_primes() {
    let (code, out, _) = call(&["primes", "residue", "--x", "1000000", "--m", "2", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let total: u64 = rows.iter().map(|r| r["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 78_498);
    assert_eq!(v["params"]["x"], 1_000_000);
    assert_eq!(v["params"]["m"], 2);
    for key in ["experiment", "seed", "summary", "version"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    for args in [
        &["primes", "hist", "--x", "2000000"][..],
        &["primes", "expsum", "--x", "300000", "--theta", "0.37", "--kind", "mangoldt"],
        &["gowers", "u3", "--lambda", "7", "--samples", "64", "--seed", "11"],
        &["fourier", "gtilde", "--theta", "0.5", "--lambda-max", "12", "--fit-grid", "64"],
        &["discrepancy", "--n", "20000"],
    ] {
        let runs: Vec<String> = ["1", "3", "8"]
            .iter()
            .map(|t| {
                let mut a = args.to_vec();
                a.extend(["--threads", t]);
                let (code, out, _) = call(&a);
                assert_eq!(code, EXIT_OK, "{args:?}");
                out
            })
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
}

#[test]
fn same_seed_same_bytes() {
    let a = call(&["gowers", "decay", "--lambda-max", "6", "--samples", "32", "--seed", "4", "--format", "json"]);
    let b = call(&["gowers", "decay", "--lambda-max", "6", "--samples", "32", "--seed", "4", "--format", "json"]);
    assert_eq!(a, b);
    let c = call(&["gowers", "decay", "--lambda-max", "6", "--samples", "32", "--seed", "5", "--format", "json"]);
    assert_ne!(a.1, c.1);
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["sz", "100", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["sz", "-5"]).0, EXIT_USAGE);
    assert_eq!(call(&["detect", "--n", "5"]).0, EXIT_USAGE);
    assert_eq!(call(&["primes", "residue", "--x", "100", "--m", "2", "--set", "nonsense=1"]).0, EXIT_USAGE);
    assert_eq!(call(&["sz", "1", "--threads", "0"]).0, EXIT_USAGE);
    let (code, _, err) = call(&["gowers", "u3", "--lambda", "5", "--samples", "4"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.starts_with("error:"));
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("primes"));
}

#[test]
fn tolerance_violation_exits_two() {
    let (code, out, err) = call(&["primes", "residue", "--x", "100000", "--m", "5", "--set", "residue_tol=0.001"]);
    assert_eq!(code, EXIT_VIOLATION);
    // the report is still written
    assert!(out.contains("class,count"));
    assert!(err.contains("violation"));
    assert_eq!(call(&["detect", "--n", "777", "--lambda", "10", "--method", "interval"]).0, EXIT_OK);
}

#[test]
fn resource_limits_exit_three() {
    assert_eq!(call(&["lod", "--x", "200000", "--eps", "0.5"]).0, EXIT_RESOURCE);
    let status = bin()
        .args(["primes", "hist", "--x", "1000000", "--set", "memory_budget=1000"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_RESOURCE));
    assert!(status.stdout.is_empty());
}

#[test]
fn config_file_and_flag_precedence() {
    let path = temp_path("cfg");
    std::fs::write(&path, "# strict\nresidue_tol = 0.000001\n").unwrap();
    let p = path.to_str().unwrap();
    let base = ["primes", "residue", "--x", "100000", "--m", "2"];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        call(&a).0
    };
    assert_eq!(with(&[]), EXIT_OK);
    assert_eq!(with(&["--config", p]), EXIT_VIOLATION);
    assert_eq!(with(&["--config", p, "--set", "residue_tol=0.5"]), EXIT_OK);
    let env_run = bin().args(base).env("ZECKLAB_CONFIG", &path).output().unwrap();
    assert_eq!(env_run.status.code(), Some(EXIT_VIOLATION));
    std::fs::remove_file(&path).unwrap();
    assert_eq!(with(&["--config", p]), EXIT_USAGE);
}

#[test]
fn csv_header_follows_metadata() {
    let (code, out, _) = call(&["primes", "min-sz", "--k-max", "3"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    assert!(header > 0);
    assert_eq!(lines[header], "k,prime");
    assert_eq!(&lines[header + 1..], &["1,2", "2,7", "3,17"]);
    assert!(out.contains("# param k_max: 3"));
    assert!(!out.contains("wall_clock"));
    assert!(call(&["primes", "min-sz", "--k-max", "1", "--timing"]).1.contains("# wall_clock_s:"));
}

#[test]
fn output_flag_writes_file() {
    let path = temp_path("out.json");
    let (code, out, _) = call(&["sz", "34", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["sz"], 1);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn binary_round_trip() {
    let o = bin().args(["sz", "100"]).output().unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(o.stdout, b"3\n");
    let o = bin().args(["expand", "0"]).output().unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let o = bin().args(["sz", "--nope"]).output().unwrap();
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn every_subcommand_runs() {
    for args in [
        &["detect", "--n", "4000", "--lambda", "9", "--method", "parallelogram"][..],
        &["detect", "--n", "4000", "--lambda", "9", "--method", "tiling"],
        &["markov", "pgf", "--n", "4", "--re", "0.5", "--im", "0.2"],
        &["markov", "joint", "--positions", "3,5", "--values", "1,0"],
        &["markov", "empirical", "--x", "100000", "--positions", "10,11", "--values", "0,1"],
        &["markov", "empirical", "--x", "100000", "--positions", "12", "--values", "1", "--primes", "--set", "digit_stat_tol=1"],
        &["fourier", "G", "--lambda", "6", "--theta", "0.3"],
        &["fourier", "omega", "--theta", "0.5", "--t", "2", "--n", "500", "--lambda", "9"],
        &["gowers", "u2", "--lambda", "6"],
        &["vaaler", "--a", "-0.2", "--b", "0.3", "--h", "8"],
        &["primes", "local-clt", "--x", "100000"],
        &["primes", "fib-scan", "--max-index", "50"],
        &["primes", "expsum", "--x", "10000", "--theta", "0.25", "--kind", "plain"],
        &["primes", "charfn", "--x", "100000", "--steps", "5"],
        &["lod", "--x", "2000", "--eps", "0.5"],
    ] {
        let (code, out, err) = call(args);
        assert_eq!(code, EXIT_OK, "{args:?}: {err}");
        assert!(out.starts_with("# experiment:"), "{args:?}");
    }
}
