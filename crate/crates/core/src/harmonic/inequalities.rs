//! Both sides of the Koksma, van der Corput and completion inequalities, for
//! numerical checking. Each routine returns `(lhs, rhs)`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::discrepancy::discrepancy_star_1d;
use super::{dist_to_int, e, StepFn};
use crate::error::{Error, Result};

/// `|N^{-1} Σ f(x_n) - ∫ f|` against `V(f) D*_N`.
pub fn koksma_check(f: &StepFn, points: &[f64]) -> Result<(f64, f64)> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let n = points.len() as f64;
    let mean: Complex64 = points.iter().map(|&x| f.eval(x)).sum::<Complex64>() / n;
    let lhs = (mean - f.integral()).norm();
    Ok((lhs, f.total_variation() * discrepancy_star_1d(points)))
}

/// `Σ_{n, n+r ∈ I} z_{n+r} conj(z_n)` for `r ≥ 0`.
fn lag_sum(z: &[Complex64], r: usize) -> Complex64 {
    if r >= z.len() {
        return Complex64::new(0.0, 0.0);
    }
    z[r..].iter().zip(z).map(|(a, b)| a * b.conj()).sum()
}

/// `|Σ z_n|²` against
/// `(N+R-1)/R Σ_{|r|<R} (1 - |r|/R) Σ_{n, n+r ∈ I} z_{n+r} conj(z_n)`.
pub fn vdc_check(z: &[Complex64], r: usize) -> Result<(f64, f64)> {
    if z.is_empty() || r == 0 {
        return Err(Error::InvalidArgument("need a nonempty sequence and R ≥ 1".into()));
    }
    let n = z.len() as f64;
    let rf = r as f64;
    let lhs = z.iter().sum::<Complex64>().norm_sqr();
    // lags r and -r are conjugate, so their sum is twice the real part
    let mut inner = lag_sum(z, 0).re;
    for k in 1..r {
        inner += 2.0 * (1.0 - k as f64 / rf) * lag_sum(z, k).re;
    }
    Ok((lhs, (n + rf - 1.0) / rf * inner))
}

/// `|Σ x_m|²` against
/// `(M + max K - min K)/|K|² Σ_{k₁,k₂ ∈ K} Σ_m x_m conj(x_{m+k₁-k₂})`.
pub fn vdc_general_check(x: &[Complex64], k: &[u64]) -> Result<(f64, f64)> {
    let mut ks = k.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if x.is_empty() || ks.is_empty() {
        return Err(Error::InvalidArgument("need a nonempty sequence and a nonempty K".into()));
    }
    let m = x.len() as f64;
    let lhs = x.iter().sum::<Complex64>().norm_sqr();
    let mut inner = Complex64::new(0.0, 0.0);
    for &k1 in &ks {
        for &k2 in &ks {
            let d = k1 as i64 - k2 as i64;
            // Σ_m x_m conj(x_{m+d}) = conj(lag_sum(x, d)) for d ≥ 0
            inner += if d >= 0 { lag_sum(x, d as usize).conj() } else { lag_sum(x, (-d) as usize) };
        }
    }
    let span = (ks[ks.len() - 1] - ks[0]) as f64;
    let kk = (ks.len() * ks.len()) as f64;
    Ok((lhs, (m + span) / kk * inner.re))
}

/// `|Σ_{x≤n<y} a_n|` against an upper Riemann sum of
/// `∫₀¹ min(y - x + 1, ‖ξ‖^{-1}) |Σ_{x≤n<z} a_n e(nξ)| dξ`.
///
/// `a[k]` is the coefficient of `n = ⌈x⌉ + k`; entries beyond `z` are
/// ignored. On each grid cell the weight takes its largest value and `|S|`
/// its largest sampled value.
pub fn vinogradov_check(a: &[Complex64], x: f64, y: f64, z: f64, grid: usize) -> Result<(f64, f64)> {
    if !(x <= y && y <= z) {
        return Err(Error::InvalidArgument("need x ≤ y ≤ z".into()));
    }
    if grid < 1000 {
        return Err(Error::InvalidArgument("grid must have at least 1000 cells".into()));
    }
    let n0 = x.ceil();
    let count = |end: f64| ((end.ceil() - n0).max(0.0) as usize).min(a.len());
    let (ny, nz) = (count(y), count(z));
    let lhs = a[..ny].iter().sum::<Complex64>().norm();
    let cap = y - x + 1.0;
    let s_abs = |xi: f64| -> f64 {
        // the offset n0 only rotates S, so it is dropped
        let step = e(xi);
        let mut w = Complex64::new(1.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        for &c in &a[..nz] {
            s += c * w;
            w *= step;
        }
        s.norm()
    };
    let h = 1.0 / grid as f64;
    let samples: Vec<f64> = (0..=2 * grid).into_par_iter().map(|j| s_abs(j as f64 * h / 2.0)).collect();
    let cells: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let (lo, hi) = (j as f64 * h, (j + 1) as f64 * h);
            let nearest = if lo < 0.5 && hi > 0.5 { 0.5 } else { dist_to_int(lo).min(dist_to_int(hi)) };
            let weight = if nearest == 0.0 { cap } else { cap.min(1.0 / nearest) };
            let s = samples[2 * j].max(samples[2 * j + 1]).max(samples[2 * j + 2]);
            weight * s * h
        })
        .collect();
    Ok((lhs, cells.iter().sum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::discrepancy::frac_n_phi_f64;
    use crate::harmonic::stepfn::build_e_theta_g;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| e(rng.gen::<f64>())).collect()
    }

    #[test]
    fn koksma() {
        let pts: Vec<f64> = (1..=2000).map(frac_n_phi_f64).collect();
        let k = StepFn::constant(Complex64::new(3.0, 1.0));
        let (lhs, rhs) = koksma_check(&k, &pts).unwrap();
        assert!(lhs < 1e-12 && rhs == 0.0);
        let f = build_e_theta_g(9, 0.5).unwrap();
        let (lhs, rhs) = koksma_check(&f, &pts).unwrap();
        assert!(lhs <= rhs && rhs > 0.0);
        assert!(koksma_check(&f, &[]).is_err());
    }

    #[test]
    fn van_der_corput_equality_case() {
        let ones = vec![Complex64::new(1.0, 0.0); 50];
        let (lhs, rhs) = vdc_check(&ones, 1).unwrap();
        assert_eq!(lhs, 2500.0);
        assert!((rhs - 2500.0).abs() < 1e-9);
        assert!(vdc_check(&ones, 0).is_err());
    }

    #[test]
    fn van_der_corput_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let n = rng.gen_range(1..80);
            let z = unimodular(&mut rng, n);
            let r = rng.gen_range(1..=8);
            let (lhs, rhs) = vdc_check(&z, r).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-9, "vdc: {lhs} > {rhs}");
            let size = rng.gen_range(1..=6);
            let ks: Vec<u64> = (0..size).map(|_| rng.gen_range(0..20)).collect();
            let (lhs, rhs) = vdc_general_check(&z, &ks).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-9, "general: {lhs} > {rhs}");
        }
        // K = {0} is the trivial bound M Σ|x|²
        let z = unimodular(&mut rng, 30);
        let (_, rhs) = vdc_general_check(&z, &[4]).unwrap();
        assert!((rhs - 900.0).abs() < 1e-9);
    }

    #[test]
    fn completion() {
        let zero = vec![Complex64::new(0.0, 0.0); 100];
        assert_eq!(vinogradov_check(&zero, 0.0, 50.0, 100.0, 1000).unwrap(), (0.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (x, y, z) in [(0.0, 300.0, 1000.0), (10.5, 800.0, 1010.5), (0.0, 1000.0, 1000.0)] {
            let a: Vec<Complex64> =
                (0..1000).map(|_| Complex64::new(if rng.gen() { 1.0 } else { -1.0 }, 0.0)).collect();
            let (lhs, rhs) = vinogradov_check(&a, x, y, z, 20_000).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-3), "{lhs} > {rhs}");
        }
        assert!(vinogradov_check(&zero, 0.0, 5.0, 1.0, 1000).is_err());
        assert!(vinogradov_check(&zero, 0.0, 5.0, 10.0, 10).is_err());
    }
}
