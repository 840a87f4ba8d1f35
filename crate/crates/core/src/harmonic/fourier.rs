//! Fourier coefficients attached to the Zeckendorf sum of digits.
//!
//! `G̃_λ(ϑ, β) = φ^{-λ} Σ_{u<F_λ} e(ϑ sz(u) + βu)` satisfies the two-term
//! recursion `G̃_{λ+1} = G̃_λ/φ + φ^{-2} α_λ G̃_{λ-1}` with
//! `α_λ = e(ϑ + βF_λ)`. The phases `βF_λ mod 1` are formed exactly from the
//! binary expansion of `β`, since `F_λ` outgrows the f64 mantissa quickly.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{Float, One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{dist_to_int, e};
use crate::detection::least_squares_slope;
use crate::error::{Error, Result};
use crate::golden::PHI;
use crate::numeration::{fib_u64, sz, sz_trunc, w_seq};

/// Largest `λ` accepted by [`fourier_gtilde_direct`].
pub const DIRECT_LAMBDA_MAX: usize = 30;
/// Largest `λ` accepted by the full-spectrum routines.
pub const SPECTRUM_LAMBDA_MAX: usize = 22;

/// `βF_k mod 1` for consecutive `k`, computed exactly.
struct FibPhases {
    mantissa: BigUint,
    bits: u32,
    negative: bool,
    mask: BigUint,
    prev: BigUint,
    cur: BigUint,
}

impl FibPhases {
    /// Phases starting at `F_k`.
    fn new(beta: f64, k: usize) -> Self {
        let (m, exp, sign) = beta.integer_decode();
        let bits = if exp >= 0 { 0 } else { (-(exp as i32)) as u32 };
        let mask = (BigUint::one() << bits) - BigUint::one();
        let (mut prev, mut cur) = (BigUint::one(), BigUint::zero());
        for _ in 0..k {
            let next = (&prev + &cur) & &mask;
            prev = cur;
            cur = next;
        }
        FibPhases { mantissa: BigUint::from(m), bits, negative: sign < 0, mask, prev, cur }
    }

    fn current(&self) -> f64 {
        if self.bits == 0 || self.mantissa.is_zero() {
            return 0.0;
        }
        let r = (&self.mantissa * &self.cur) & &self.mask;
        let x = if self.bits > 60 {
            (r >> (self.bits - 60) as usize).to_f64().unwrap() / 2f64.powi(60)
        } else {
            r.to_f64().unwrap() / 2f64.powi(self.bits as i32)
        };
        if self.negative && x > 0.0 {
            1.0 - x
        } else {
            x
        }
    }

    fn advance(&mut self) {
        let next = (&self.prev + &self.cur) & &self.mask;
        self.prev = std::mem::replace(&mut self.cur, next);
    }
}

/// `βF_k mod 1`, exactly up to the final rounding.
pub fn beta_fib_frac(beta: f64, k: usize) -> f64 {
    FibPhases::new(beta, k).current()
}

/// `βu mod 1` with the product rounding error folded back in.
fn beta_u_frac(beta: f64, u: u64) -> f64 {
    let x = u as f64;
    let p = beta * x;
    let err = beta.mul_add(x, -p);
    let r = (p - p.floor()) + err;
    r - r.floor()
}

/// `φ^{-λ} Σ_{u<F_λ} e(ϑ sz(u) + βu)` by direct summation.
pub fn fourier_gtilde_direct(lambda: usize, theta: f64, beta: f64) -> Result<Complex64> {
    if lambda > DIRECT_LAMBDA_MAX {
        return Err(Error::OutOfRange(format!("lambda = {lambda} above {DIRECT_LAMBDA_MAX}")));
    }
    let f = fib_u64(lambda).unwrap();
    let s = chunked_sum(f, |u| e(theta * sz(u) as f64 + beta_u_frac(beta, u)));
    Ok(s * PHI.powi(-(lambda as i32)))
}

fn transfer(alpha: Complex64) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    [[one / PHI, alpha / (PHI * PHI)], [one, Complex64::new(0.0, 0.0)]]
}

fn mat_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `G̃_λ(ϑ, β)` through the transfer-matrix recursion.
pub fn fourier_gtilde_matrix(lambda: usize, theta: f64, beta: f64) -> Complex64 {
    match lambda {
        0 => return Complex64::new(0.0, 0.0),
        1 => return Complex64::new(1.0 / PHI, 0.0),
        _ => {}
    }
    let mut cur = Complex64::new(PHI.powi(-2), 0.0);
    let mut prev = Complex64::new(1.0 / PHI, 0.0);
    let mut phases = FibPhases::new(beta, 2);
    for _ in 2..lambda {
        let alpha = e(theta + phases.current());
        let next = cur / PHI + alpha * prev / (PHI * PHI);
        prev = cur;
        cur = next;
        phases.advance();
    }
    cur
}

/// Row-sum norm of `A_{λ+4} A_{λ+3} A_{λ+2} A_{λ+1} A_λ`.
pub fn block5_row_sum_norm(lambda: usize, theta: f64, beta: f64) -> f64 {
    let mut phases = FibPhases::new(beta, lambda);
    let mut prod = transfer(e(theta + phases.current()));
    for _ in 1..5 {
        phases.advance();
        prod = mat_mul(&transfer(e(theta + phases.current())), &prod);
    }
    prod.iter().map(|row| row[0].norm() + row[1].norm()).fold(0.0, f64::max)
}

/// `G_λ(ϑ, h) = F_λ^{-1} Σ_{u<F_λ} e(ϑ sz(u) - hu/F_λ)`.
pub fn fourier_g(lambda: usize, theta: f64, h: u64) -> Result<Complex64> {
    if !(2..=DIRECT_LAMBDA_MAX).contains(&lambda) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} outside 2..={DIRECT_LAMBDA_MAX}")));
    }
    let f = fib_u64(lambda).unwrap();
    if h >= f {
        return Err(Error::OutOfRange(format!("h = {h} not below F_lambda = {f}")));
    }
    let s = chunked_sum(f, |u| {
        let hu = (h as u128 * u as u128 % f as u128) as f64;
        e(theta * sz(u) as f64 - hu / f as f64)
    });
    Ok(s / f as f64)
}

/// `G_λ(ϑ, h)` for every `0 ≤ h < F_λ`.
pub fn fourier_g_spectrum(lambda: usize, theta: f64) -> Result<Vec<Complex64>> {
    if !(2..=SPECTRUM_LAMBDA_MAX).contains(&lambda) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} outside 2..={SPECTRUM_LAMBDA_MAX}")));
    }
    let f = fib_u64(lambda).unwrap();
    let roots: Vec<Complex64> = (0..f).map(|j| e(-(j as f64) / f as f64)).collect();
    let terms: Vec<Complex64> = (0..f).map(|u| e(theta * sz(u) as f64)).collect();
    Ok((0..f)
        .into_par_iter()
        .map(|h| {
            let s: Complex64 = terms
                .iter()
                .enumerate()
                .map(|(u, &a)| a * roots[(h * u as u64 % f) as usize])
                .sum();
            s / f as f64
        })
        .collect())
}

/// `ω_t(ϑ, N) = N^{-1} Σ_{n<N} e(ϑ(sz_λ(n+t) - sz_λ(n)))`.
pub fn omega(theta: f64, t: u64, big_n: u64, lambda: usize) -> Complex64 {
    if big_n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let s = chunked_sum(big_n, |n| {
        e(theta * (sz_trunc(n + t, lambda) as f64 - sz_trunc(n, lambda) as f64))
    });
    s / big_n as f64
}

/// Sum of `term(n)` over `n < count` in fixed-size chunks added in order.
fn chunked_sum(count: u64, term: impl Fn(u64) -> Complex64 + Sync) -> Complex64 {
    const CHUNK: u64 = 1 << 14;
    let parts: Vec<Complex64> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(count)).map(&term).sum())
        .collect();
    parts.into_iter().sum()
}

/// `|Σ_h |G_λ(h)|² e(ht/F_λ) - F_λ^{-1} Σ_{w_i ≤ v < w_{i+1}} e(ϑ(sz_λ(v+t) - sz_λ(v)))|`
/// for a block `[w_i, w_{i+1})` of length `F_λ`.
pub fn correlation_identity_check(lambda: usize, t: u64, theta: f64, i: usize) -> Result<f64> {
    if lambda < 3 {
        return Err(Error::OutOfRange("lambda must be at least 3".into()));
    }
    let spectrum = fourier_g_spectrum(lambda, theta)?;
    correlation_residual(lambda, t, theta, i, &spectrum)
}

fn correlation_residual(
    lambda: usize,
    t: u64,
    theta: f64,
    i: usize,
    spectrum: &[Complex64],
) -> Result<f64> {
    let f = fib_u64(lambda).unwrap();
    let w = w_seq(lambda, i + 2)?;
    if w[i + 1] - w[i] != f {
        return Err(Error::InvalidArgument(format!("block {i} has gap {}, not F_lambda", w[i + 1] - w[i])));
    }
    let lhs: Complex64 = spectrum
        .iter()
        .enumerate()
        .map(|(h, g)| g.norm_sqr() * e((h as u64 * t % f) as f64 / f as f64))
        .sum();
    let rhs: Complex64 = (w[i]..w[i + 1])
        .map(|v| e(theta * (sz_trunc(v + t, lambda) as f64 - sz_trunc(v, lambda) as f64)))
        .sum::<Complex64>()
        / f as f64;
    Ok((lhs - rhs).norm())
}

/// Smallest `K` with residual `≤ K t / F_λ` over `1 ≤ t ≤ t_max` and the first
/// `blocks` blocks of length `F_λ`.
pub fn fit_correlation_constant(lambda: usize, theta: f64, t_max: u64, blocks: usize) -> Result<f64> {
    if lambda < 3 {
        return Err(Error::OutOfRange("lambda must be at least 3".into()));
    }
    let f = fib_u64(lambda).unwrap();
    let spectrum = fourier_g_spectrum(lambda, theta)?;
    let w = w_seq(lambda, 4 * blocks + 2)?;
    let full: Vec<usize> = (0..w.len() - 1).filter(|&i| w[i + 1] - w[i] == f).take(blocks).collect();
    let mut k: f64 = 0.0;
    for &i in &full {
        for t in 1..=t_max {
            let r = correlation_residual(lambda, t, theta, i, &spectrum)?;
            k = k.max(r * f as f64 / t as f64);
        }
    }
    Ok(k)
}

/// Exponential fit of `max_β |G̃_λ(ϑ, β)|` over a uniform `β` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierDecayFit {
    pub theta: f64,
    /// `(λ, max_β |G̃_λ|)`.
    pub maxima: Vec<(usize, f64)>,
    /// Fitted decay of `log max_β |G̃_λ|` per unit `λ`.
    pub rate_per_lambda: f64,
    /// Rate `c` in `C e^{-cλ‖ϑ‖²}`.
    pub c: f64,
    /// Smallest `C` making the bound hold at every fitted point.
    pub big_c: f64,
}

pub fn fourier_decay_fit(
    theta: f64,
    lambdas: std::ops::RangeInclusive<usize>,
    grid: usize,
) -> Result<FourierDecayFit> {
    if grid == 0 || dist_to_int(theta) == 0.0 {
        return Err(Error::InvalidArgument("need a nonempty grid and a non-integer theta".into()));
    }
    let maxima: Vec<(usize, f64)> = lambdas
        .map(|l| {
            let m = (0..grid)
                .into_par_iter()
                .map(|k| fourier_gtilde_matrix(l, theta, k as f64 / grid as f64).norm())
                .collect::<Vec<f64>>()
                .into_iter()
                .fold(0.0, f64::max);
            (l, m)
        })
        .collect();
    let d2 = dist_to_int(theta).powi(2);
    let pts: Vec<(f64, f64)> = maxima.iter().map(|&(l, m)| (l as f64, m.ln())).collect();
    let rate_per_lambda = -least_squares_slope(&pts);
    let c = rate_per_lambda / d2;
    let big_c = maxima
        .iter()
        .map(|&(l, m)| m * (c * l as f64 * d2).exp())
        .fold(0.0, f64::max);
    Ok(FourierDecayFit { theta, maxima, rate_per_lambda, c, big_c })
}
