//! Statistics of `sz(p)` over primes `p ≤ x`.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::golden::PHI;
use crate::harmonic::e;
use crate::markov::MarkovDigitModel;
use crate::numeration::{fib, fib_u64, sz, zeck_expand, MAX_FIB_INDEX};
use crate::primes::primality::{is_prime_u64, is_probable_prime};
use crate::primes::sieve::PrimeSieve;

/// `log_φ x`.
pub fn log_phi(x: f64) -> f64 {
    x.ln() / PHI.ln()
}

fn add_vecs<T: Copy + std::ops::AddAssign + Default>(mut a: Vec<T>, b: Vec<T>) -> Vec<T> {
    if a.len() < b.len() {
        a.resize(b.len(), T::default());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Counts of primes `p ≤ x` by the number of ones of `p` at the indices in
/// `mask`; entry `k` counts primes with `k` such ones.
pub fn masked_sz_histogram_primes(x: u64, mask: u128) -> Result<Vec<u64>> {
    let sieve = PrimeSieve::new(x)?;
    Ok(sieve.fold_primes(
        || vec![0u64; 48],
        |h, p| h[(zeck_expand(p).bits() & mask).count_ones() as usize] += 1,
        add_vecs,
    ))
}

/// Counts of primes `p ≤ x` by `sz(p)`; entry `k` counts primes with `sz = k`.
pub fn sz_histogram_primes(x: u64) -> Result<Vec<u64>> {
    let mut h = masked_sz_histogram_primes(x, u128::MAX)?;
    while h.len() > 1 && h.last() == Some(&0) {
        h.pop();
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalCltRow {
    pub k: u32,
    pub observed: u64,
    pub predicted: f64,
    pub abs_err: f64,
}

/// Observed counts of `sz(p) = k` against the Gaussian prediction
/// `π(x)/√(2πσ²L) · exp(-(k - μL)²/(2σ²L))` with `L = log_φ x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalCltTable {
    pub x: u64,
    pub pi: u64,
    pub rows: Vec<LocalCltRow>,
    /// `sup_k |observed - predicted| / π(x)`.
    pub sup_rel_err: f64,
    pub modal_k: u32,
    /// `|observed - predicted| / observed` at the modal `k`.
    pub modal_rel_err: f64,
    /// `Σ_k predicted / π(x)`.
    pub predicted_mass: f64,
}

pub fn local_clt_from_histogram(x: u64, hist: &[u64]) -> LocalCltTable {
    let model = MarkovDigitModel::new();
    let l = log_phi(x as f64);
    let mean = model.mu_f64() * l;
    let var = model.sigma2_f64() * l;
    let pi: u64 = hist.iter().sum();
    let scale = pi as f64 / (2.0 * PI * var).sqrt();
    let kmax = (hist.len() as u32).max((mean + 12.0 * var.sqrt()).ceil() as u32);
    let rows: Vec<LocalCltRow> = (0..=kmax)
        .map(|k| {
            let observed = hist.get(k as usize).copied().unwrap_or(0);
            let predicted = scale * (-(k as f64 - mean).powi(2) / (2.0 * var)).exp();
            LocalCltRow { k, observed, predicted, abs_err: (observed as f64 - predicted).abs() }
        })
        .collect();
    let sup = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    let modal = rows.iter().max_by_key(|r| (r.observed, std::cmp::Reverse(r.k))).unwrap();
    LocalCltTable {
        x,
        pi,
        sup_rel_err: sup / pi as f64,
        modal_k: modal.k,
        modal_rel_err: modal.abs_err / modal.observed.max(1) as f64,
        predicted_mass: rows.iter().map(|r| r.predicted).sum::<f64>() / pi as f64,
        rows,
    }
}

pub fn local_clt_table(x: u64) -> Result<LocalCltTable> {
    if x < 1000 {
        return Err(Error::OutOfRange("local CLT table needs x ≥ 1000".into()));
    }
    Ok(local_clt_from_histogram(x, &sz_histogram_primes(x)?))
}

/// Class counts of `sz(p) mod m` from a histogram of `sz(p)`.
pub fn residue_counts_from_histogram(hist: &[u64], m: u32) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let mut counts = vec![0u64; m as usize];
    for (k, &c) in hist.iter().enumerate() {
        counts[k % m as usize] += c;
    }
    Ok(counts)
}

/// `max_a |count_a / total - 1/m|`.
pub fn deviation_from_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let m = counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 / total as f64 - 1.0 / m).abs())
        .fold(0.0, f64::max)
}

/// Counts of primes `p ≤ x` in each class of `sz(p) mod m`.
pub fn residue_counts(x: u64, m: u32) -> Result<Vec<u64>> {
    residue_counts_from_histogram(&sz_histogram_primes(x)?, m)
}

pub fn residue_deviation(x: u64, m: u32) -> Result<f64> {
    Ok(deviation_from_counts(&residue_counts(x, m)?))
}

/// Integers with exactly `k` Zeckendorf ones, in increasing order, below
/// `F_bound`.
#[derive(Clone, Debug)]
pub struct FixedSzIntegers {
    bits: u128,
    bound: usize,
    done: bool,
}

impl FixedSzIntegers {
    pub fn new(k: u32, bound: usize) -> Result<Self> {
        if bound > MAX_FIB_INDEX {
            return Err(Error::OutOfRange(format!("index bound {bound} exceeds 93")));
        }
        // 2, 4, …, 2k carry the smallest value F_{2k+1} - 1
        let bits = (1..=k as usize).fold(0u128, |b, j| b | (1u128 << (2 * j)));
        let done = k == 0 || 2 * k as usize >= bound;
        Ok(FixedSzIntegers { bits, bound, done })
    }
}

impl Iterator for FixedSzIntegers {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let current = self.bits;
        // successor: lowest one at i with i+1, i+2 empty moves to i+1 and
        // the ones below it drop to 2, 4, …
        let mut below = 0usize;
        let mut i = 2usize;
        loop {
            if current >> i & 1 == 1 {
                if current >> (i + 1) & 3 == 0 {
                    break;
                }
                below += 1;
            }
            i += 1;
        }
        if i + 1 >= self.bound {
            self.done = true;
        } else {
            let high = (current >> (i + 1)) << (i + 1);
            let mut next = high | (1u128 << (i + 1));
            for j in 1..=below {
                next |= 1u128 << (2 * j);
            }
            self.bits = next;
        }
        let value: u64 = (2..=MAX_FIB_INDEX)
            .filter(|&j| current >> j & 1 == 1)
            .map(|j| fib_u64(j).unwrap())
            .sum();
        Some(value)
    }
}

/// The smallest prime with `sz = k` below `F_bound`, if any.
pub fn smallest_prime_with_sz(k: u32, index_bound: usize) -> Result<Option<u64>> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    Ok(FixedSzIntegers::new(k, index_bound)?.find(|&n| is_prime_u64(n)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibPrime {
    pub index: usize,
    /// `true` when primality is proven, `false` for a probable prime.
    pub proven: bool,
}

/// Indices `k ≤ max_index` with `F_k` prime or probable prime.
pub fn fibonacci_prime_scan(max_index: usize) -> Result<Vec<FibPrime>> {
    if max_index > 1000 {
        return Err(Error::OutOfRange("Fibonacci scan limited to index 1000".into()));
    }
    let found: Vec<Option<FibPrime>> = (0..=max_index)
        .into_par_iter()
        .map(|k| {
            let f: BigUint = fib(k);
            let proven = k <= MAX_FIB_INDEX;
            is_probable_prime(&f).then_some(FibPrime { index: k, proven })
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn reduce_theta(theta: f64) -> f64 {
    theta - theta.floor()
}

/// `Σ_{p ≤ x} e(ϑp)`.
pub fn exp_sum_primes(theta: f64, x: u64) -> Result<Complex64> {
    let th = reduce_theta(theta);
    let sieve = PrimeSieve::new(x)?;
    Ok(sieve.fold_primes(
        || Complex64::new(0.0, 0.0),
        |s, p| {
            let ph = th * (p % (1u64 << 40)) as f64 + th * ((p >> 40) << 40) as f64;
            *s += e(ph - ph.floor());
        },
        |a, b| a + b,
    ))
}

/// `Σ_k c_k e(ϑk)` for a histogram or weight vector `c`.
pub fn eval_digit_sum_transform(weights: &[f64], theta: f64) -> Complex64 {
    let th = reduce_theta(theta);
    weights
        .iter()
        .enumerate()
        .map(|(k, &w)| w * e(th * k as f64))
        .sum()
}

/// `Σ_{p ≤ x} e(ϑ sz(p))`.
pub fn exp_sum_sz_primes(theta: f64, x: u64) -> Result<Complex64> {
    let hist: Vec<f64> = sz_histogram_primes(x)?.into_iter().map(|c| c as f64).collect();
    Ok(eval_digit_sum_transform(&hist, theta))
}

/// `w_k = Σ log p` over prime powers `p^j ≤ x` with `sz(p^j) = k`.
pub fn mangoldt_sz_weights(x: u64) -> Result<Vec<f64>> {
    let sieve = PrimeSieve::new(x)?;
    Ok(sieve.fold_primes(
        || vec![0.0f64; 48],
        |w, p| {
            let lp = (p as f64).ln();
            let mut q = p;
            loop {
                w[sz(q) as usize] += lp;
                match q.checked_mul(p) {
                    Some(next) if next <= x => q = next,
                    _ => break,
                }
            }
        },
        add_vecs,
    ))
}

/// `Σ_{n ≤ x} Λ(n) e(ϑ sz(n))`.
pub fn exp_sum_sz_mangoldt(theta: f64, x: u64) -> Result<Complex64> {
    Ok(eval_digit_sum_transform(&mangoldt_sz_weights(x)?, theta))
}

/// `(log x)³ (x√‖ϑ‖ + √(x/‖ϑ‖) + x^{4/5})`.
pub fn exp_sum_primes_shape(theta: f64, x: u64) -> f64 {
    let th = reduce_theta(theta);
    let dist = th.min(1.0 - th);
    let xf = x as f64;
    let mid = if dist > 0.0 { (xf / dist).sqrt() } else { f64::INFINITY };
    xf.ln().powi(3) * (xf * dist.sqrt() + mid + xf.powf(0.8))
}

/// Largest `x` accepted by [`lod_statistic`].
pub const LOD_MAX_X: u64 = 100_000;

/// `Σ_{d ≤ D} max_{a < d} |Σ_{0 ≤ n ≤ x, n ≡ a (d)} e(ϑ sz(n))|` with
/// `D = ⌊x^{1-ε}⌋`.
pub fn lod_statistic(x: u64, eps: f64, theta: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} outside (0, 1)")));
    }
    if x > LOD_MAX_X {
        return Err(Error::ResourceLimit(format!("x = {x} above {LOD_MAX_X}")));
    }
    let d_max = (x as f64).powf(1.0 - eps).floor().max(1.0) as u64;
    Ok(lod_terms(x, d_max, theta).iter().sum())
}

/// The per-modulus maxima `max_a |…|` for `d = 1..=D`.
pub fn lod_terms(x: u64, d_max: u64, theta: f64) -> Vec<f64> {
    let th = reduce_theta(theta);
    let values: Vec<Complex64> = (0..=x).map(|n| e(th * sz(n) as f64)).collect();
    (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let mut sums = vec![Complex64::new(0.0, 0.0); d as usize];
            for (n, &z) in values.iter().enumerate() {
                sums[n % d as usize] += z;
            }
            sums.iter().map(|s| s.norm()).fold(0.0, f64::max)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CharFnMode {
    Full,
    /// Digits restricted to `L^ν ≤ k ≤ L - L^ν`.
    Truncated(f64),
}

/// The distribution behind a characteristic function of primes:
/// a histogram of the (possibly truncated) digit sum and its centring length.
#[derive(Clone, Debug)]
pub struct PrimeCharFn {
    pub hist: Vec<u64>,
    /// `L` for the full sum, `L'` (number of kept indices) when truncated.
    pub length: u32,
}

impl PrimeCharFn {
    pub fn new(x: u64, mode: CharFnMode) -> Result<Self> {
        if x < 1000 {
            return Err(Error::OutOfRange("characteristic function needs x ≥ 1000".into()));
        }
        let l = log_phi(x as f64).floor() as u32;
        let (mask, length) = match mode {
            CharFnMode::Full => (u128::MAX, l),
            CharFnMode::Truncated(nu) => {
                if !(nu > 0.0 && nu < 0.5) {
                    return Err(Error::OutOfRange(format!("nu = {nu} outside (0, 1/2)")));
                }
                let lf = l as f64;
                let lo = lf.powf(nu).ceil() as u32;
                let hi = (lf - lf.powf(nu)).floor() as u32;
                let mut mask = 0u128;
                let mut count = 0;
                for k in lo..=hi {
                    count += 1;
                    if (2..=MAX_FIB_INDEX as u32).contains(&k) {
                        mask |= 1u128 << k;
                    }
                }
                (mask, count)
            }
        };
        Ok(PrimeCharFn { hist: masked_sz_histogram_primes(x, mask)?, length })
    }

    /// `π(x)^{-1} Σ_p exp(it(s(p) - Lμ)/√(Lσ²))`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let model = MarkovDigitModel::new();
        let l = self.length as f64;
        let scale = (l * model.sigma2_f64()).sqrt();
        let centre = l * model.mu_f64();
        let total: u64 = self.hist.iter().sum();
        let s: Complex64 = self
            .hist
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * Complex64::from_polar(1.0, t * (k as f64 - centre) / scale))
            .sum();
        s / total as f64
    }
}

pub fn char_fn_primes(t: f64, x: u64, mode: CharFnMode) -> Result<Complex64> {
    Ok(PrimeCharFn::new(x, mode)?.eval(t))
}
