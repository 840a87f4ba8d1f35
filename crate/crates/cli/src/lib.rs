//! Command-line front end for the zecklab experiments.
//!
//! Every experiment writes an [`ExperimentReport`] as CSV (default) or JSON.
//! `expand` and `sz` print plain text unless `--format` is given.
//!
//! Exit codes: 0 success, 1 usage error, 2 property or tolerance violation,
//! 3 resource limit.
//!
//! Tolerances come from the defaults, then the file given by `--config` or
//! `ZECKLAB_CONFIG`, then `--set key=value` flags, each overriding the last.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zecklab::config::Config;
use zecklab::report::ExperimentReport;

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "zecklab", version, about = "Zeckendorf digit experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized estimators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Configuration file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set residue_tol=0.02`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Record the wall clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeckendorf indices of n, largest first.
    Expand { n: u64 },
    /// Number of Zeckendorf summands of n.
    Sz { n: u64 },
    /// Low digits v(n, λ) recovered from the torus.
    Detect(DetectArgs),
    /// The Markov digit model.
    #[command(subcommand)]
    Markov(MarkovCmd),
    /// Zeckendorf Fourier transforms.
    #[command(subcommand)]
    Fourier(FourierCmd),
    /// Gowers norms of e(ϑ g_λ).
    #[command(subcommand)]
    Gowers(GowersCmd),
    /// Discrepancy of ({nφ}) against the bounded-quotient bound.
    Discrepancy(DiscrepancyArgs),
    /// Vaaler's majorant and minorant polynomials for an interval.
    Vaaler(VaalerArgs),
    /// Digit sums of primes.
    #[command(subcommand)]
    Primes(PrimesCmd),
    /// Level-of-distribution statistic over [0, x].
    Lod(LodArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Interval,
    Parallelogram,
    Tiling,
}

#[derive(Args, Debug, Serialize)]
struct DetectArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    lambda: usize,
    #[arg(long, value_enum, default_value = "interval")]
    method: Method,
}

#[derive(Subcommand, Debug)]
enum MarkovCmd {
    /// E v^{S_n} and the exact moments for n = 1..=N.
    Pgf(PgfArgs),
    /// Exact joint probability of a digit pattern.
    Joint(JointArgs),
    /// Empirical pattern frequency against the chain.
    Empirical(EmpiricalArgs),
}

#[derive(Args, Debug, Serialize)]
struct PgfArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1.0)]
    re: f64,
    #[arg(long, default_value_t = 0.0)]
    im: f64,
}

#[derive(Args, Debug, Serialize)]
struct JointArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    positions: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<u8>,
}

#[derive(Args, Debug, Serialize)]
struct EmpiricalArgs {
    #[arg(long)]
    x: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    positions: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<u8>,
    /// Count over primes instead of all integers.
    #[arg(long)]
    primes: bool,
}

#[derive(Subcommand, Debug)]
enum FourierCmd {
    /// G̃_λ(ϑ, β) by the matrix recursion.
    Gtilde(GtildeArgs),
    /// The spectrum G_λ(h), 0 ≤ h < F_λ.
    #[command(name = "G")]
    G(SpectrumArgs),
    /// ω_t(ϑ, N).
    Omega(OmegaArgs),
}

#[derive(Args, Debug, Serialize)]
struct GtildeArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 2)]
    lambda_min: usize,
    #[arg(long, default_value_t = 25)]
    lambda_max: usize,
    /// Also fit the decay of max_β |G̃_λ| over a β grid of this size.
    #[arg(long)]
    fit_grid: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[arg(long)]
    lambda: usize,
    #[arg(long)]
    theta: f64,
}

#[derive(Args, Debug, Serialize)]
struct OmegaArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    t: u64,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    lambda: usize,
}

#[derive(Subcommand, Debug)]
enum GowersCmd {
    /// Exact U² norm, with the Fourier route for comparison.
    U2(U2Args),
    /// Quasi-Monte Carlo U³ estimate.
    U3(U3Args),
    /// U² and U³ over a range of λ.
    Decay(DecayArgs),
}

#[derive(Args, Debug, Serialize)]
struct U2Args {
    #[arg(long)]
    lambda: usize,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 2000)]
    h_max: u32,
}

#[derive(Args, Debug, Serialize)]
struct U3Args {
    #[arg(long)]
    lambda: usize,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

#[derive(Args, Debug, Serialize)]
struct DecayArgs {
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 4)]
    lambda_min: usize,
    #[arg(long, default_value_t = 12)]
    lambda_max: usize,
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

#[derive(Args, Debug, Serialize)]
struct DiscrepancyArgs {
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000,1000000")]
    n: Vec<u64>,
}

#[derive(Args, Debug, Serialize)]
struct VaalerArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long)]
    h: usize,
    /// Grid size for the envelope check.
    #[arg(long, default_value_t = 10_000)]
    grid: usize,
}

#[derive(Subcommand, Debug)]
enum PrimesCmd {
    /// Histogram of sz(p) for p ≤ x.
    Hist(XArgs),
    /// Observed counts against the Gaussian local limit.
    LocalClt(XArgs),
    /// Class counts of sz(p) mod m.
    Residue(ResidueArgs),
    /// Smallest prime with sz = k.
    MinSz(MinSzArgs),
    /// Indices k with F_k prime.
    FibScan(FibScanArgs),
    /// Exponential sums over primes.
    Expsum(ExpsumArgs),
    /// Characteristic function of the normalised digit sum of primes.
    Charfn(CharfnArgs),
}

#[derive(Args, Debug, Serialize)]
struct XArgs {
    #[arg(long)]
    x: u64,
}

#[derive(Args, Debug, Serialize)]
struct ResidueArgs {
    #[arg(long)]
    x: u64,
    #[arg(long)]
    m: u32,
}

#[derive(Args, Debug, Serialize)]
struct MinSzArgs {
    #[arg(long, default_value_t = 15)]
    k_max: u32,
    /// Largest Fibonacci index searched; defaults to 2k + 10.
    #[arg(long)]
    index_bound: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct FibScanArgs {
    #[arg(long, default_value_t = 450)]
    max_index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SumKind {
    /// Σ_{p ≤ x} e(ϑ sz(p)).
    Sz,
    /// Σ_{p ≤ x} e(ϑ p).
    Plain,
    /// Σ_{n ≤ x} Λ(n) e(ϑ sz(n)).
    Mangoldt,
}

#[derive(Args, Debug, Serialize)]
struct ExpsumArgs {
    #[arg(long)]
    x: u64,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, value_enum, default_value = "sz")]
    kind: SumKind,
}

#[derive(Args, Debug, Serialize)]
struct CharfnArgs {
    #[arg(long)]
    x: u64,
    #[arg(long, default_value_t = 2.0)]
    t_max: f64,
    #[arg(long, default_value_t = 21)]
    steps: usize,
    /// Restrict digits to [L^ν, L - L^ν].
    #[arg(long)]
    nu: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct LodArgs {
    #[arg(long)]
    x: u64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
}

/// What a command produced.
enum Output {
    Plain(String),
    Report {
        report: ExperimentReport,
        /// Description of a failed property or tolerance.
        violation: Option<String>,
    },
}

struct Ctx {
    cfg: Config,
    seed: u64,
    format_given: bool,
}

/// Runs the command line `argv` (including the program name) with the
/// process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr())
}

/// Like [`run`], writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let g = &cli.global;
    let mut cfg = match Config::resolve(g.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    for kv in &g.set {
        let applied = match kv.split_once('=') {
            Some((k, v)) => cfg.set(k.trim(), v.trim()),
            None => Err(zecklab::Error::InvalidArgument(format!("--set expects KEY=VALUE, got {kv:?}"))),
        };
        if let Err(e) = applied {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    }
    zecklab::primes::sieve::set_memory_budget(cfg.memory_budget);
    let ctx = Ctx { cfg, seed: g.seed, format_given: g.format.is_some() };

    let start = Instant::now();
    let result = match g.threads {
        Some(0) => {
            let _ = writeln!(err, "error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli.command, &ctx, err)),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start worker pool: {e}");
                return EXIT_RESOURCE;
            }
        },
        None => commands::dispatch(&cli.command, &ctx, err),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                zecklab::Error::ResourceLimit(_) => EXIT_RESOURCE,
                zecklab::Error::Internal(_) => EXIT_VIOLATION,
                _ => EXIT_USAGE,
            };
        }
    };

    let (text, violation) = match output {
        Output::Plain(s) => (s, None),
        Output::Report { mut report, violation } => {
            report.seed = Some(ctx.seed);
            if g.timing {
                report.wall_clock_s = Some(start.elapsed().as_secs_f64());
            }
            let text = match g.format.unwrap_or(Format::Csv) {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            };
            (text, violation)
        }
    };
    let written = match &g.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    match violation {
        Some(v) => {
            let _ = writeln!(err, "violation: {v}");
            EXIT_VIOLATION
        }
        None => EXIT_OK,
    }
}
