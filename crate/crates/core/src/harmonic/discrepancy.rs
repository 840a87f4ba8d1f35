//! Discrepancy of finite point sets and Erdős–Turán–Koksma bound shapes.
//!
//! The ETK routines evaluate the right-hand sides with the implicit constant
//! set to 1; comparisons against measured discrepancies go through a fitted
//! constant.

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;

use super::e;
use crate::error::{Error, Result};
use crate::golden::{GoldenInt, PHI};

/// Low-order correction `φ - PHI`.
const PHI_LO: f64 = -5.432_115_203_682_506e-17;

fn sorted(points: &[f64]) -> Vec<f64> {
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Star discrepancy `sup_t |#{x_n < t}/N - t|`.
pub fn discrepancy_star_1d(points: &[f64]) -> f64 {
    star_sorted(&sorted(points))
}

fn star_sorted(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Extreme discrepancy, the supremum over all subintervals of `[0, 1)`.
pub fn discrepancy_extreme_1d(points: &[f64]) -> f64 {
    extreme_sorted(&sorted(points))
}

fn extreme_sorted(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let (mut hi, mut lo) = (f64::MIN, f64::MAX);
    for (i, &x) in xs.iter().enumerate() {
        let d = (i + 1) as f64 / n - x;
        hi = hi.max(d);
        lo = lo.min(d);
    }
    1.0 / n + hi - lo
}

/// `{nφ}` in double precision with the rounding of `nφ` compensated.
pub fn frac_n_phi_f64(n: u64) -> f64 {
    let x = n as f64;
    let p = x * PHI;
    let err = x.mul_add(PHI, -p) + x * PHI_LO;
    let r = (p - p.floor()) + err;
    r - r.floor()
}

/// Extreme discrepancy of `({nφ})_{1 ≤ n ≤ N}`; the points are ordered by
/// their exact positions.
pub fn discrepancy_nalpha(big_n: u64) -> Result<f64> {
    if big_n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let mut pts: Vec<(f64, u64)> = (1..=big_n).into_par_iter().map(|n| (frac_n_phi_f64(n), n)).collect();
    let exact = |n: u64| GoldenInt::new(BigInt::from(0), BigInt::from(n)).frac();
    pts.par_sort_by(|a, b| {
        if (a.0 - b.0).abs() > 1e-8 {
            a.0.total_cmp(&b.0)
        } else {
            exact(a.1).cmp(&exact(b.1))
        }
    });
    let xs: Vec<f64> = pts.into_iter().map(|p| p.0).collect();
    Ok(extreme_sorted(&xs))
}

/// `3 + (1/φ + K/log(K+1)) log N`, the bound for `N D_N` when all partial
/// quotients are at most `K`.
pub fn bounded_quotient_bound(big_n: u64, k: u32) -> f64 {
    let k = k as f64;
    3.0 + (1.0 / PHI + k / (k + 1.0).ln()) * (big_n as f64).ln()
}

/// `1/H + Σ_{0<|h|<H} |h|^{-1} |N^{-1} Σ_n e(h x_n)|`.
pub fn etk_bound_1d(points: &[f64], h: u32) -> Result<f64> {
    if h == 0 || points.is_empty() {
        return Err(Error::InvalidArgument("need H ≥ 1 and a nonempty point set".into()));
    }
    let n = points.len() as f64;
    let sums = power_sums(points, h.saturating_sub(1) as usize);
    let tail: f64 = sums.iter().enumerate().map(|(k, s)| 2.0 * s.norm() / (n * (k + 1) as f64)).sum();
    Ok(1.0 / h as f64 + tail)
}

/// `Σ_n e(h x_n)` for `h = 1..=hmax`, accumulated in fixed chunks.
fn power_sums(points: &[f64], hmax: usize) -> Vec<Complex64> {
    if hmax == 0 {
        return Vec::new();
    }
    let parts: Vec<Vec<Complex64>> = points
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); hmax];
            for &x in chunk {
                let step = e(x);
                let mut z = step;
                for a in acc.iter_mut() {
                    *a += z;
                    z *= step;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Complex64::new(0.0, 0.0); hmax];
    for p in parts {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// `1/H + Σ_{0<‖h‖∞<H} r(h)^{-1} |N^{-1} Σ_n e(h·x_n)|` in two dimensions.
pub fn etk_bound_2d(points: &[[f64; 2]], h: u32) -> Result<f64> {
    if h == 0 || points.is_empty() {
        return Err(Error::InvalidArgument("need H ≥ 1 and a nonempty point set".into()));
    }
    let r = |v: [i64; 2]| (v[0].unsigned_abs().max(1) * v[1].unsigned_abs().max(1)) as f64;
    Ok(1.0 / h as f64 + lattice_sum(points, h as i64 - 1, r))
}

/// `1/H + Σ_{0<‖h‖∞≤H} Π_i max(1, |h·w_i|)^{-1} |N^{-1} Σ_n e(h·x_n)|` for
/// parallelograms with edge directions `w_1, w_2`.
pub fn etk_parallelotope_bound(points: &[[f64; 2]], h: u32, edges: [[f64; 2]; 2]) -> Result<f64> {
    if h == 0 || points.is_empty() {
        return Err(Error::InvalidArgument("need H ≥ 1 and a nonempty point set".into()));
    }
    for w in &edges {
        if ((w[0] * w[0] + w[1] * w[1]).sqrt() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("edges must be unit vectors".into()));
        }
    }
    let det = edges[0][0] * edges[1][1] - edges[0][1] * edges[1][0];
    if det.abs() < 1e-12 {
        return Err(Error::InvalidArgument("edges must be linearly independent".into()));
    }
    let weight = |v: [i64; 2]| {
        edges
            .iter()
            .map(|w| (v[0] as f64 * w[0] + v[1] as f64 * w[1]).abs().max(1.0))
            .product::<f64>()
    };
    Ok(1.0 / h as f64 + lattice_sum(points, h as i64, weight))
}

/// `Σ_{0<‖h‖∞≤m} |N^{-1} Σ_n e(h·x_n)| / weight(h)`, pairing `h` with `-h`.
fn lattice_sum(points: &[[f64; 2]], m: i64, weight: impl Fn([i64; 2]) -> f64 + Sync) -> f64 {
    if m <= 0 {
        return 0.0;
    }
    let n = points.len() as f64;
    let width = (2 * m + 1) as usize;
    // half-plane: h1 > 0, or h1 = 0 and h2 > 0
    let rows: Vec<f64> = (0..=m)
        .into_par_iter()
        .map(|h1| {
            let mut sums = vec![Complex64::new(0.0, 0.0); width];
            for p in points {
                let base = e(h1 as f64 * p[0]);
                let step = e(p[1]);
                let mut z = base * e(-(m as f64) * p[1]);
                for s in sums.iter_mut() {
                    *s += z;
                    z *= step;
                }
            }
            sums.iter()
                .enumerate()
                .filter(|&(j, _)| h1 > 0 || j as i64 > m)
                .map(|(j, s)| 2.0 * s.norm() / (n * weight([h1, j as i64 - m])))
                .sum()
        })
        .collect();
    rows.iter().sum()
}
