//! Gowers `U²` and `U³` norms of step functions on the torus.
//!
//! `‖f‖_{U²}⁴ = ∫ |C(t)|² dt` with `C(t) = ∫ f(x) conj(f(x+t)) dx`. For a step
//! function `C` is piecewise linear: each pair of arcs contributes a trapezoid
//! in `t`. Sweeping the trapezoid kinks in order integrates `|C|²` piece by
//! piece in closed form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stepfn::{build_e_theta_g, StepFn};
use crate::error::{Error, Result};

/// Largest number of arcs accepted by the piecewise route.
pub const U2_ARC_BUDGET: usize = 1200;

/// Offset step of the `U³` sample sequence, `√2 - 1`.
pub const U3_STEP: f64 = std::f64::consts::SQRT_2 - 1.0;

fn wrap(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `‖f‖_{U²}⁴` by the piecewise-quadratic sweep.
pub fn u2_fourth_power(f: &StepFn) -> Result<f64> {
    let m = f.num_arcs();
    if m > U2_ARC_BUDGET {
        return Err(Error::ResourceLimit(format!("{m} arcs exceed the budget of {U2_ARC_BUDGET}")));
    }
    let arcs: Vec<(f64, f64, Complex64)> = f.arcs().collect();
    let mut events: Vec<(f64, Complex64)> = Vec::with_capacity(4 * m * m);
    for &(a, p, vi) in &arcs {
        for &(b, q, vj) in &arcs {
            let w = vi * vj.conj();
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let d = b - a;
            events.push((wrap(d - p), w));
            events.push((wrap(d - (p - q).max(0.0)), -w));
            events.push((wrap(d - (p - q).min(0.0)), -w));
            events.push((wrap(d + q), w));
        }
    }
    events.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));
    // periodicity forces ∫ C' = 0, which fixes the slope just after t = 0
    let mut slope: Complex64 = -events.iter().map(|&(t, dw)| dw * (1.0 - t)).sum::<Complex64>();
    let mut c: Complex64 = arcs.iter().map(|&(_, p, v)| v.norm_sqr() * p).sum::<f64>().into();
    let mut t0 = 0.0;
    let mut total = 0.0;
    let mut piece = |c0: Complex64, c1: Complex64, h: f64| {
        total += h * (c0.norm_sqr() + (c0 * c1.conj()).re + c1.norm_sqr()) / 3.0;
    };
    for &(t, dw) in &events {
        if t > t0 {
            let c1 = c + slope * (t - t0);
            piece(c, c1, t - t0);
            c = c1;
            t0 = t;
        }
        slope += dw;
    }
    if t0 < 1.0 {
        let c1 = c + slope * (1.0 - t0);
        piece(c, c1, 1.0 - t0);
    }
    Ok(total.max(0.0))
}

/// `‖f‖_{U²}`.
pub fn gowers_u2_exact(f: &StepFn) -> Result<f64> {
    Ok(u2_fourth_power(f)?.powf(0.25))
}

/// `‖f‖_{U²}` from `Σ_{|h| ≤ H} |f̂(h)|⁴`, with an upper bound for the
/// omitted tail of the fourth power.
pub fn gowers_u2_fourier(f: &StepFn, h_max: u32) -> (f64, f64) {
    let bps = f.breakpoints();
    let vals = f.values();
    let m = vals.len();
    let jumps: Vec<Complex64> = (0..m).map(|i| vals[i] - vals[(i + m - 1) % m]).collect();
    let f0 = f.integral();
    let sum: f64 = (1..=h_max)
        .into_par_iter()
        .map(|h| {
            let mut plus = Complex64::new(0.0, 0.0);
            let mut minus = Complex64::new(0.0, 0.0);
            for (&a, &j) in bps.iter().zip(&jumps) {
                let z = super::e(-(h as f64) * a);
                plus += j * z;
                minus += j * z.conj();
            }
            let denom = std::f64::consts::TAU * h as f64;
            (plus.norm() / denom).powi(4) + (minus.norm() / denom).powi(4)
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let fourth = f0.norm().powi(4) + sum;
    let v = f.total_variation() / std::f64::consts::TAU;
    let tail = 2.0 * v.powi(4) / (3.0 * (h_max as f64).powi(3));
    (fourth.powf(0.25), tail)
}

/// Estimate of `‖f‖_{U³}` with a jackknife standard error.
///
/// Averages `‖Δ(f; z)‖_{U²}⁴` over `z_k = x₀ + k(√2 - 1) mod 1`, with `x₀`
/// drawn from the seed, and returns the eighth root of the mean.
pub fn gowers_u3_estimate(f: &StepFn, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples < 16 {
        return Err(Error::OutOfRange("at least 16 samples required".into()));
    }
    if 2 * f.num_arcs() > U2_ARC_BUDGET {
        return Err(Error::ResourceLimit(format!("{} arcs exceed the U³ budget", f.num_arcs())));
    }
    let x0: f64 = ChaCha8Rng::seed_from_u64(seed).gen();
    let vals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let z = wrap(x0 + k as f64 * U3_STEP);
            u2_fourth_power(&f.derivative(z))
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = samples as f64;
    let total: f64 = vals.iter().sum();
    let estimate = (total / n).max(0.0).powf(0.125);
    let loo: Vec<f64> = vals
        .iter()
        .map(|&v| ((total - v) / (n - 1.0)).max(0.0).powf(0.125))
        .collect();
    let mean_loo = loo.iter().sum::<f64>() / n;
    let se = ((n - 1.0) / n * loo.iter().map(|&x| (x - mean_loo).powi(2)).sum::<f64>()).sqrt();
    Ok((estimate, se))
}

/// `‖e(ϑ g_λ)‖_{U²}` for each `λ` in the range.
pub fn u2_decay(theta: f64, lambdas: std::ops::RangeInclusive<usize>) -> Result<Vec<(usize, f64)>> {
    lambdas
        .map(|l| Ok((l, gowers_u2_exact(&build_e_theta_g(l, theta)?)?)))
        .collect()
}

/// `(λ, estimate, standard error)` of the `U³` norm of `e(ϑ g_λ)`.
pub fn u3_decay(
    theta: f64,
    lambdas: std::ops::RangeInclusive<usize>,
    samples: usize,
    seed: u64,
) -> Result<Vec<(usize, f64, f64)>> {
    lambdas
        .map(|l| {
            let (est, se) = gowers_u3_estimate(&build_e_theta_g(l, theta)?, samples, seed)?;
            Ok((l, est, se))
        })
        .collect()
}
