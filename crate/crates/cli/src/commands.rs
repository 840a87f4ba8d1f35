use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use zecklab::detection::{frac_n_phi_pow, Tiling, LowDigitDetector, detect_via_b};
use zecklab::harmonic::discrepancy::{bounded_quotient_bound, discrepancy_nalpha};
use zecklab::harmonic::fourier::{fourier_decay_fit, fourier_g_spectrum, fourier_gtilde_matrix, omega};
use zecklab::harmonic::gowers::{gowers_u2_exact, gowers_u2_fourier, gowers_u3_estimate};
use zecklab::harmonic::stepfn::build_e_theta_g;
use zecklab::harmonic::vaaler::vaaler;
use zecklab::markov::{
    char_fn_model, empirical_joint_integers, empirical_joint_primes, MarkovDigitModel,
};
use zecklab::primes::experiments::{
    deviation_from_counts, exp_sum_primes, exp_sum_primes_shape, exp_sum_sz_mangoldt,
    exp_sum_sz_primes, fibonacci_prime_scan, local_clt_table, lod_terms, residue_counts,
    smallest_prime_with_sz, sz_histogram_primes, CharFnMode, PrimeCharFn, LOD_MAX_X,
};
use zecklab::report::ExperimentReport;
use zecklab::{sz, v, zeck_expand, Error, Result};

use crate::*;

fn new_report(name: &str, columns: &[&str], params: &impl Serialize) -> ExperimentReport {
    let mut r = ExperimentReport::new(name, columns);
    if let Ok(Value::Object(map)) = serde_json::to_value(params) {
        for (k, v) in map {
            r.param(&k, v);
        }
    }
    r
}

fn done(report: ExperimentReport) -> Result<Output> {
    Ok(Output::Report { report, violation: None })
}

fn checked(report: ExperimentReport, violation: Option<String>) -> Result<Output> {
    Ok(Output::Report { report, violation })
}

fn progress(err: &mut (dyn Write + Send), x: u64) {
    if x >= 10_000_000 {
        let _ = writeln!(err, "sieving primes up to {x}");
    }
}

pub(crate) fn dispatch(cmd: &Command, ctx: &Ctx, err: &mut (dyn Write + Send)) -> Result<Output> {
    match cmd {
        Command::Expand { n } => expand(*n, ctx),
        Command::Sz { n } => sz_cmd(*n, ctx),
        Command::Detect(a) => detect(a),
        Command::Markov(c) => match c {
            MarkovCmd::Pgf(a) => markov_pgf(a),
            MarkovCmd::Joint(a) => markov_joint(a),
            MarkovCmd::Empirical(a) => markov_empirical(a, ctx, err),
        },
        Command::Fourier(c) => match c {
            FourierCmd::Gtilde(a) => fourier_gtilde(a, ctx),
            FourierCmd::G(a) => fourier_spectrum(a),
            FourierCmd::Omega(a) => fourier_omega(a),
        },
        Command::Gowers(c) => match c {
            GowersCmd::U2(a) => gowers_u2(a),
            GowersCmd::U3(a) => gowers_u3(a, ctx),
            GowersCmd::Decay(a) => gowers_decay(a, ctx),
        },
        Command::Discrepancy(a) => discrepancy(a),
        Command::Vaaler(a) => vaaler_cmd(a),
        Command::Primes(c) => match c {
            PrimesCmd::Hist(a) => primes_hist(a, err),
            PrimesCmd::LocalClt(a) => primes_local_clt(a, ctx, err),
            PrimesCmd::Residue(a) => primes_residue(a, ctx, err),
            PrimesCmd::MinSz(a) => primes_min_sz(a),
            PrimesCmd::FibScan(a) => primes_fib_scan(a),
            PrimesCmd::Expsum(a) => primes_expsum(a, err),
            PrimesCmd::Charfn(a) => primes_charfn(a, err),
        },
        Command::Lod(a) => lod(a),
    }
}

fn expand(n: u64, ctx: &Ctx) -> Result<Output> {
    let mut idx: Vec<usize> = zeck_expand(n).indices().collect();
    idx.reverse();
    if !ctx.format_given {
        let words: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
        return Ok(Output::Plain(format!("{}\n", words.join(" "))));
    }
    let mut r = new_report("expand", &["index", "fibonacci"], &json!({ "n": n }));
    for k in idx {
        r.push_row(vec![json!(k), json!(zecklab::numeration::fib_u64(k))])?;
    }
    done(r)
}

fn sz_cmd(n: u64, ctx: &Ctx) -> Result<Output> {
    if !ctx.format_given {
        return Ok(Output::Plain(format!("{}\n", sz(n))));
    }
    let mut r = new_report("sz", &["n", "sz"], &json!({ "n": n }));
    r.push_row(vec![json!(n), json!(sz(n))])?;
    done(r)
}

fn detect(a: &DetectArgs) -> Result<Output> {
    let want = v(a.n, a.lambda);
    let got = match a.method {
        Method::Interval => LowDigitDetector::new(a.lambda)?.detect(a.n)?,
        Method::Parallelogram => detect_via_b(a.n, a.lambda)?,
        Method::Tiling => {
            // digit by digit; the tiling is only correct up to a rate φ^{-k}
            if !(2..=90).contains(&a.lambda) {
                return Err(Error::OutOfRange(format!("lambda = {} outside 2..=90", a.lambda)));
            }
            let tiling = Tiling::new();
            (2..a.lambda)
                .filter(|&k| {
                    let k = k as i64;
                    tiling.classify(&frac_n_phi_pow(a.n, -k), &frac_n_phi_pow(a.n, -k - 1)) == 1
                })
                .map(|k| zecklab::numeration::fib_u64(k).unwrap())
                .sum()
        }
    };
    let mut r = new_report("detect", &["n", "lambda", "method", "detected", "expected", "match"], a);
    r.push_row(vec![
        json!(a.n),
        json!(a.lambda),
        json!(a.method),
        json!(got),
        json!(want),
        json!(got == want),
    ])?;
    r.summary("match", got == want);
    let violation = (got != want && a.method != Method::Tiling)
        .then(|| format!("detected {got} but v(n, λ) = {want}"));
    checked(r, violation)
}

fn markov_pgf(a: &PgfArgs) -> Result<Output> {
    let model = MarkovDigitModel::new();
    let z = Complex64::new(a.re, a.im);
    let mut r = new_report(
        "markov pgf",
        &["n", "pgf_re", "pgf_im", "mean", "variance", "mean_exact", "variance_exact"],
        a,
    );
    for n in 1..=a.n {
        let p = model.pgf(z, n)?;
        let (m, var) = model.mean_var(n);
        r.push_row(vec![
            json!(n),
            json!(p.re),
            json!(p.im),
            json!(m.to_f64()),
            json!(var.to_f64()),
            json!(m.to_string()),
            json!(var.to_string()),
        ])?;
    }
    r.summary("mu", model.mu_f64()).summary("sigma2", model.sigma2_f64());
    done(r)
}

fn markov_joint(a: &JointArgs) -> Result<Output> {
    let p = MarkovDigitModel::new().joint_prob(&a.positions, &a.values)?;
    let mut r = new_report("markov joint", &["probability", "probability_exact"], a);
    r.push_row(vec![json!(p.to_f64()), json!(p.to_string())])?;
    done(r)
}

fn markov_empirical(a: &EmpiricalArgs, ctx: &Ctx, err: &mut (dyn Write + Send)) -> Result<Output> {
    let got = if a.primes {
        progress(err, a.x);
        empirical_joint_primes(a.x, &a.positions, &a.values)?
    } else {
        empirical_joint_integers(a.x, &a.positions, &a.values)?
    };
    let positions: Vec<u64> = a.positions.iter().map(|&k| k as u64).collect();
    let want = MarkovDigitModel::new().joint_prob(&positions, &a.values)?.to_f64();
    let diff = (got - want).abs();
    let mut r = new_report("markov empirical", &["empirical", "model", "abs_err"], a);
    r.push_row(vec![json!(got), json!(want), json!(diff)])?;
    r.summary("tolerance", ctx.cfg.digit_stat_tol);
    let tol = ctx.cfg.digit_stat_tol;
    checked(r, (diff > tol).then(|| format!("|empirical - model| = {diff:e} > {tol}")))
}

fn fourier_gtilde(a: &GtildeArgs, ctx: &Ctx) -> Result<Output> {
    if a.lambda_min < 2 || a.lambda_min > a.lambda_max {
        return Err(Error::OutOfRange(format!("lambda range {}..={}", a.lambda_min, a.lambda_max)));
    }
    let mut r = new_report("fourier gtilde", &["lambda", "re", "im", "abs"], a);
    for l in a.lambda_min..=a.lambda_max {
        let g = fourier_gtilde_matrix(l, a.theta, a.beta);
        r.push_row(vec![json!(l), json!(g.re), json!(g.im), json!(g.norm())])?;
    }
    let mut violation = None;
    if let Some(grid) = a.fit_grid {
        let fit = fourier_decay_fit(a.theta, a.lambda_min..=a.lambda_max, grid)?;
        r.summary("rate_per_lambda", fit.rate_per_lambda)
            .summary("c", fit.c)
            .summary("big_c", fit.big_c)
            .summary("rate_min", ctx.cfg.fourier_rate_min);
        if fit.rate_per_lambda < ctx.cfg.fourier_rate_min {
            violation = Some(format!(
                "decay rate {} below {}",
                fit.rate_per_lambda, ctx.cfg.fourier_rate_min
            ));
        }
    }
    checked(r, violation)
}

fn fourier_spectrum(a: &SpectrumArgs) -> Result<Output> {
    let spec = fourier_g_spectrum(a.lambda, a.theta)?;
    let mut r = new_report("fourier G", &["h", "re", "im", "abs"], a);
    for (h, g) in spec.iter().enumerate() {
        r.push_row(vec![json!(h), json!(g.re), json!(g.im), json!(g.norm())])?;
    }
    r.summary("sum_abs_sq", spec.iter().map(|g| g.norm_sqr()).sum::<f64>());
    done(r)
}

fn fourier_omega(a: &OmegaArgs) -> Result<Output> {
    let w = omega(a.theta, a.t, a.n, a.lambda);
    let mut r = new_report("fourier omega", &["re", "im", "abs"], a);
    r.push_row(vec![json!(w.re), json!(w.im), json!(w.norm())])?;
    done(r)
}

fn gowers_u2(a: &U2Args) -> Result<Output> {
    let f = build_e_theta_g(a.lambda, a.theta)?;
    let exact = gowers_u2_exact(&f)?;
    let (fourier, tail) = gowers_u2_fourier(&f, a.h_max);
    let mut r = new_report("gowers u2", &["lambda", "arcs", "u2_exact", "u2_fourier", "fourier_tail"], a);
    r.push_row(vec![json!(a.lambda), json!(f.num_arcs()), json!(exact), json!(fourier), json!(tail)])?;
    done(r)
}

fn gowers_u3(a: &U3Args, ctx: &Ctx) -> Result<Output> {
    let f = build_e_theta_g(a.lambda, a.theta)?;
    let (est, se) = gowers_u3_estimate(&f, a.samples, ctx.seed)?;
    let mut r = new_report("gowers u3", &["lambda", "u3", "stderr"], a);
    r.push_row(vec![json!(a.lambda), json!(est), json!(se)])?;
    done(r)
}

fn gowers_decay(a: &DecayArgs, ctx: &Ctx) -> Result<Output> {
    let mut r = new_report("gowers decay", &["lambda", "u2", "u3", "u3_stderr"], a);
    let mut u2s = Vec::new();
    for l in a.lambda_min..=a.lambda_max {
        let f = build_e_theta_g(l, a.theta)?;
        let u2 = gowers_u2_exact(&f)?;
        let (u3, se) = gowers_u3_estimate(&f, a.samples, ctx.seed)?;
        r.push_row(vec![json!(l), json!(u2), json!(u3), json!(se)])?;
        u2s.push(u2);
    }
    let decreasing = u2s.windows(2).all(|w| w[1] < w[0]);
    r.summary("u2_strictly_decreasing", decreasing);
    checked(r, (!decreasing).then(|| "U² is not strictly decreasing in λ".to_string()))
}

fn discrepancy(a: &DiscrepancyArgs) -> Result<Output> {
    let mut r = new_report("discrepancy", &["n", "discrepancy", "n_times_d", "bound"], a);
    let mut violation = None;
    for &n in &a.n {
        let d = discrepancy_nalpha(n)?;
        let bound = bounded_quotient_bound(n, 1);
        let nd = n as f64 * d;
        if nd > bound {
            violation = Some(format!("N D_N = {nd} exceeds {bound} at N = {n}"));
        }
        r.push_row(vec![json!(n), json!(d), json!(nd), json!(bound)])?;
    }
    checked(r, violation)
}

fn vaaler_cmd(a: &VaalerArgs) -> Result<Output> {
    let (pa, pb) = vaaler(a.a, a.b, a.h)?;
    if a.grid == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    let mut r = new_report("vaaler", &["h", "a_re", "a_im", "b_re", "b_im"], a);
    for k in -(a.h as i64)..=(a.h as i64) {
        let (x, y) = (pa.coeff(k), pb.coeff(k));
        r.push_row(vec![json!(k), json!(x.re), json!(x.im), json!(y.re), json!(y.im)])?;
    }
    let len = a.b - a.a;
    let excess = (0..a.grid)
        .map(|j| {
            let x = j as f64 / a.grid as f64;
            let t = (x - a.a) - (x - a.a).floor();
            let chi = if t <= len { 1.0 } else { 0.0 };
            (chi - pa.eval(x)).abs() - pb.eval(x)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    r.summary("max_envelope_excess", excess);
    checked(r, (excess > 1e-9).then(|| format!("|χ - A| exceeds B by {excess:e}")))
}

fn primes_hist(a: &XArgs, err: &mut (dyn Write + Send)) -> Result<Output> {
    progress(err, a.x);
    let hist = sz_histogram_primes(a.x)?;
    let mut r = new_report("primes hist", &["k", "count"], a);
    for (k, &c) in hist.iter().enumerate() {
        r.push_row(vec![json!(k), json!(c)])?;
    }
    r.summary("pi", hist.iter().sum::<u64>());
    done(r)
}

fn primes_local_clt(a: &XArgs, ctx: &Ctx, err: &mut (dyn Write + Send)) -> Result<Output> {
    progress(err, a.x);
    let t = local_clt_table(a.x)?;
    let mut r = new_report("primes local-clt", &["k", "observed", "predicted", "abs_err"], a);
    for row in &t.rows {
        r.push_row(vec![json!(row.k), json!(row.observed), json!(row.predicted), json!(row.abs_err)])?;
    }
    let (sup_tol, modal_tol) = (ctx.cfg.local_clt_sup_tol, ctx.cfg.local_clt_modal_tol);
    r.summary("pi", t.pi)
        .summary("sup_rel_err", t.sup_rel_err)
        .summary("modal_k", t.modal_k)
        .summary("modal_rel_err", t.modal_rel_err)
        .summary("predicted_mass", t.predicted_mass)
        .summary("sup_tol", sup_tol)
        .summary("modal_tol", modal_tol);
    let mut problems = Vec::new();
    if t.sup_rel_err > sup_tol {
        problems.push(format!("sup error {} > {sup_tol}", t.sup_rel_err));
    }
    if t.modal_rel_err > modal_tol {
        problems.push(format!("modal error {} > {modal_tol}", t.modal_rel_err));
    }
    checked(r, (!problems.is_empty()).then(|| problems.join("; ")))
}

fn primes_residue(a: &ResidueArgs, ctx: &Ctx, err: &mut (dyn Write + Send)) -> Result<Output> {
    progress(err, a.x);
    let counts = residue_counts(a.x, a.m)?;
    let dev = deviation_from_counts(&counts);
    let mut r = new_report("primes residue", &["class", "count"], a);
    for (c, &n) in counts.iter().enumerate() {
        r.push_row(vec![json!(c), json!(n)])?;
    }
    let tol = ctx.cfg.residue_tol;
    r.summary("pi", counts.iter().sum::<u64>())
        .summary("deviation", dev)
        .summary("tolerance", tol);
    checked(r, (dev > tol).then(|| format!("deviation {dev} > {tol}")))
}

fn primes_min_sz(a: &MinSzArgs) -> Result<Output> {
    let mut r = new_report("primes min-sz", &["k", "prime"], a);
    for k in 1..=a.k_max {
        let bound = a.index_bound.unwrap_or(2 * k as usize + 10);
        let p = smallest_prime_with_sz(k, bound)?;
        r.push_row(vec![json!(k), json!(p)])?;
    }
    done(r)
}

fn primes_fib_scan(a: &FibScanArgs) -> Result<Output> {
    let found = fibonacci_prime_scan(a.max_index)?;
    let mut r = new_report("primes fib-scan", &["index", "status"], a);
    for f in &found {
        r.push_row(vec![json!(f.index), json!(if f.proven { "proven" } else { "probable" })])?;
    }
    done(r)
}

fn primes_expsum(a: &ExpsumArgs, err: &mut (dyn Write + Send)) -> Result<Output> {
    progress(err, a.x);
    let s = match a.kind {
        SumKind::Sz => exp_sum_sz_primes(a.theta, a.x)?,
        SumKind::Plain => exp_sum_primes(a.theta, a.x)?,
        SumKind::Mangoldt => exp_sum_sz_mangoldt(a.theta, a.x)?,
    };
    let mut r = new_report("primes expsum", &["re", "im", "abs"], a);
    r.push_row(vec![json!(s.re), json!(s.im), json!(s.norm())])?;
    if a.kind == SumKind::Plain {
        r.summary("shape", exp_sum_primes_shape(a.theta, a.x));
    }
    done(r)
}

fn primes_charfn(a: &CharfnArgs, err: &mut (dyn Write + Send)) -> Result<Output> {
    if a.steps < 2 || a.t_max.is_nan() || a.t_max <= 0.0 {
        return Err(Error::InvalidArgument("need steps ≥ 2 and t_max > 0".into()));
    }
    progress(err, a.x);
    let mode = match a.nu {
        Some(nu) => CharFnMode::Truncated(nu),
        None => CharFnMode::Full,
    };
    let cf = PrimeCharFn::new(a.x, mode)?;
    let mut r = new_report("primes charfn", &["t", "re", "im", "model_re", "model_im", "abs_diff"], a);
    for j in 0..a.steps {
        let t = -a.t_max + 2.0 * a.t_max * j as f64 / (a.steps - 1) as f64;
        let p = cf.eval(t);
        let m = char_fn_model(t, cf.length)?;
        r.push_row(vec![json!(t), json!(p.re), json!(p.im), json!(m.re), json!(m.im), json!((p - m).norm())])?;
    }
    r.summary("length", cf.length);
    done(r)
}

fn lod(a: &LodArgs) -> Result<Output> {
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {} outside (0, 1)", a.eps)));
    }
    if a.x > LOD_MAX_X {
        return Err(Error::ResourceLimit(format!("x = {} above {LOD_MAX_X}", a.x)));
    }
    let d_max = (a.x as f64).powf(1.0 - a.eps).floor().max(1.0) as u64;
    let terms = lod_terms(a.x, d_max, a.theta);
    let mut r = new_report("lod", &["d", "max_abs"], a);
    for (d, t) in terms.iter().enumerate() {
        r.push_row(vec![json!(d + 1), json!(t)])?;
    }
    let stat: f64 = terms.iter().sum();
    let xf = a.x as f64;
    r.summary("d_max", d_max)
        .summary("statistic", stat)
        .summary("normalized", stat / (xf * xf.ln().powf(2.75)));
    done(r)
}
