//! The stationary two-state Markov chain that models Zeckendorf digits.
//!
//! States are digit values. From 0 the chain moves to 0 with probability
//! `1/φ` and to 1 with probability `1/φ²`; from 1 it always moves to 0.
//! Transition powers live in `Z[φ]` and the stationary law has denominator 5,
//! so every finite-dimensional probability is an exact element of `Q(φ)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::golden::{GoldenInt, GoldenRational, PHI};
use crate::numeration::{fib, fib_u64, zeck_expand, MAX_FIB_INDEX};
use crate::primes::sieve::PrimeSieve;

type Mat = [[GoldenInt; 2]; 2];

fn gi(a: i64, b: i64) -> GoldenInt {
    GoldenInt::new(a, b)
}

fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    let e = |i: usize, j: usize| &(&x[i][0] * &y[0][j]) + &(&x[i][1] * &y[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn mat_pow(m: &Mat, mut e: u64) -> Mat {
    let mut acc = [[GoldenInt::one(), GoldenInt::zero()], [GoldenInt::zero(), GoldenInt::one()]];
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base);
        }
        base = mat_mul(&base, &base);
        e >>= 1;
    }
    acc
}

/// The chain `(P, π)` with its moment constants.
#[derive(Clone, Debug)]
pub struct MarkovDigitModel {
    p: Mat,
}

impl Default for MarkovDigitModel {
    fn default() -> Self {
        Self::new()
    }
}

impl MarkovDigitModel {
    pub fn new() -> Self {
        // 1/φ = φ - 1, 1/φ² = 2 - φ
        MarkovDigitModel { p: [[gi(-1, 1), gi(2, -1)], [gi(1, 0), gi(0, 0)]] }
    }

    /// Transition matrix with entries in `Z[φ]`.
    pub fn transition(&self) -> &[[GoldenInt; 2]; 2] {
        &self.p
    }

    /// `P^m`.
    pub fn transition_pow(&self, m: u64) -> [[GoldenInt; 2]; 2] {
        mat_pow(&self.p, m)
    }

    /// Stationary law `(φ²/(φ²+1), 1/(φ²+1)) = ((φ+2)/5, (3-φ)/5)`.
    pub fn stationary(&self) -> [GoldenRational; 2] {
        [
            GoldenRational::new(gi(2, 1), 5).unwrap(),
            GoldenRational::new(gi(3, -1), 5).unwrap(),
        ]
    }

    /// `μ = 1/(φ²+1)`.
    pub fn mu(&self) -> GoldenRational {
        self.stationary()[1].clone()
    }

    /// `σ² = φ³/(φ²+1)³`.
    pub fn sigma2(&self) -> GoldenRational {
        let phi3 = GoldenRational::from_golden(GoldenInt::phi_pow(3));
        let d = GoldenRational::from_golden(gi(2, 1));
        phi3.div(&d.mul(&d).mul(&d)).unwrap()
    }

    pub fn mu_f64(&self) -> f64 {
        1.0 / (PHI * PHI + 1.0)
    }

    pub fn sigma2_f64(&self) -> f64 {
        PHI.powi(3) / (PHI * PHI + 1.0).powi(3)
    }

    /// `E v^{S_n}` for `S_n = Z_1 + … + Z_n` from the closed form
    /// `a λ₁ⁿ + b λ₂ⁿ`.
    pub fn pgf(&self, v: Complex64, n: u32) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::OutOfRange("n must be at least 1".into()));
        }
        let root = (Complex64::new(1.0, 0.0) + 4.0 * v).sqrt();
        let l1 = (1.0 + root) / (2.0 * PHI);
        let l2 = (1.0 - root) / (2.0 * PHI);
        let diff = l1 - l2;
        if diff.norm() < 1e-6 {
            return Ok(self.pgf_matrix(v, n));
        }
        let phi2 = PHI * PHI;
        let c = (phi2 + v) / (phi2 + 1.0);
        let a = (c - l2) / diff;
        let b = (l1 - c) / diff;
        Ok(a * l1.powu(n) + b * l2.powu(n))
    }

    /// `(π₀, vπ₁)·[[1/φ, v/φ²], [1, 0]]^{n-1}·(1, 1)ᵀ` by repeated products.
    pub fn pgf_matrix(&self, v: Complex64, n: u32) -> Complex64 {
        let mu = self.mu_f64();
        let mut row = [Complex64::new(1.0 - mu, 0.0), v * mu];
        for _ in 1..n {
            row = [row[0] / PHI + row[1], row[0] * v / (PHI * PHI)];
        }
        row[0] + row[1]
    }

    /// Exact mean `n/(φ²+1)` and variance `nσ² + 2/25 - (2/25)(-φ^{-2})^n`.
    pub fn mean_var(&self, n: u32) -> (GoldenRational, GoldenRational) {
        let nn = GoldenRational::from_ratio(n as i64, 1).unwrap();
        let mean = nn.mul(&self.mu());
        let two_25 = GoldenRational::from_ratio(2, 25).unwrap();
        let mut q = GoldenInt::phi_pow(-2 * n as i64);
        if n % 2 == 1 {
            q = -q;
        }
        let var = nn
            .mul(&self.sigma2())
            .add(&two_25)
            .sub(&two_25.mul(&GoldenRational::from_golden(q)));
        (mean, var)
    }

    pub fn mean_var_f64(&self, n: u32) -> (f64, f64) {
        let (m, v) = self.mean_var(n);
        (m.to_f64(), v.to_f64())
    }

    /// `Pr[Z_{k₁} = ν₁, …, Z_{k_d} = ν_d]` under the stationary chain.
    pub fn joint_prob(&self, positions: &[u64], values: &[u8]) -> Result<GoldenRational> {
        if positions.len() != values.len() || positions.is_empty() {
            return Err(Error::InvalidArgument("positions and values must have equal nonzero length".into()));
        }
        if values.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("values must be bits".into()));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("positions must be increasing".into()));
        }
        let mut prob = self.stationary()[values[0] as usize].clone();
        let mut factor = GoldenInt::one();
        for i in 1..positions.len() {
            let pm = self.transition_pow(positions[i] - positions[i - 1]);
            factor = &factor * &pm[values[i - 1] as usize][values[i] as usize];
        }
        prob = prob.mul(&GoldenRational::from_golden(factor));
        Ok(prob)
    }

    /// A seeded path `Z₀, …, Z_{n-1}`: `Z₀` drawn from `π`, then steps by `P`.
    pub fn sample_path(&self, n: usize, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = self.mu_f64();
        let stay = 1.0 / PHI;
        let mut out = Vec::with_capacity(n);
        if n == 0 {
            return out;
        }
        let mut z = u8::from(rng.gen::<f64>() < mu);
        out.push(z);
        while out.len() < n {
            z = if z == 1 { 0 } else { u8::from(rng.gen::<f64>() >= stay) };
            out.push(z);
        }
        out
    }

    /// `E exp(it(S_L - Lμ)/√(Lσ²))` evaluated exactly from the generating
    /// function.
    pub fn char_fn(&self, t: f64, l: u32) -> Result<Complex64> {
        if l == 0 {
            return Err(Error::OutOfRange("L must be at least 1".into()));
        }
        let scale = (l as f64 * self.sigma2_f64()).sqrt();
        let v = Complex64::from_polar(1.0, t / scale);
        let shift = Complex64::from_polar(1.0, -t * l as f64 * self.mu_f64() / scale);
        Ok(self.pgf(v, l)? * shift)
    }
}

/// `E v^{S_n}` under the stationary chain.
pub fn pgf_sn(v: Complex64, n: u32) -> Result<Complex64> {
    MarkovDigitModel::new().pgf(v, n)
}

/// Exact mean and variance of `S_n`.
pub fn mean_var_sn(n: u32) -> (GoldenRational, GoldenRational) {
    MarkovDigitModel::new().mean_var(n)
}

/// Characteristic function of the normalised `S_L`.
pub fn char_fn_model(t: f64, l: u32) -> Result<Complex64> {
    MarkovDigitModel::new().char_fn(t, l)
}

/// Fraction of integers with expansion length exactly `len` whose digit
/// `δ_k` equals `b`.
pub fn exact_digit_prob(len: usize, k: usize, b: u8) -> Result<BigRational> {
    if !(2 <= k && k <= len && b <= 1) {
        return Err(Error::OutOfRange(format!("need 2 ≤ k = {k} ≤ len = {len} and b ∈ {{0,1}}")));
    }
    let den = BigInt::from(fib(len - 1));
    // F_{-1} = 1
    let f = |i: i64| -> BigInt {
        if i < 0 {
            BigInt::from(1)
        } else {
            BigInt::from(fib(i as usize))
        }
    };
    let (k, len) = (k as i64, len as i64);
    let num = if b == 0 {
        f(k) * f(len - k)
    } else {
        f(k - 1) * f(len - k - 1)
    };
    Ok(BigRational::new(num, den))
}

fn pattern_mask(positions: &[usize], values: &[u8], x: u64) -> Result<(u128, u128)> {
    if positions.len() != values.len() || positions.is_empty() {
        return Err(Error::InvalidArgument("positions and values must have equal nonzero length".into()));
    }
    let mut mask = 0u128;
    let mut want = 0u128;
    for (&k, &b) in positions.iter().zip(values) {
        let in_range = (2..=MAX_FIB_INDEX).contains(&k) && fib_u64(k).is_some_and(|f| f <= x);
        if !in_range {
            return Err(Error::OutOfRange(format!("position {k} outside the expansion range of {x}")));
        }
        if b > 1 {
            return Err(Error::InvalidArgument("values must be bits".into()));
        }
        mask |= 1u128 << k;
        want |= (b as u128) << k;
    }
    Ok((mask, want))
}

/// Frequency of the digit pattern among `0 ≤ n < x`.
pub fn empirical_joint_integers(x: u64, positions: &[usize], values: &[u8]) -> Result<f64> {
    if x < 2 {
        return Err(Error::OutOfRange("x must be at least 2".into()));
    }
    let (mask, want) = pattern_mask(positions, values, x)?;
    let hits = (0..x)
        .into_par_iter()
        .filter(|&n| zeck_expand(n).bits() & mask == want)
        .count();
    Ok(hits as f64 / x as f64)
}

/// Frequency of the digit pattern among primes `p ≤ x`.
pub fn empirical_joint_primes(x: u64, positions: &[usize], values: &[u8]) -> Result<f64> {
    if x < 2 {
        return Err(Error::OutOfRange("x must be at least 2".into()));
    }
    let (mask, want) = pattern_mask(positions, values, x)?;
    let sieve = PrimeSieve::new(x)?;
    let (hits, total) = sieve.fold_primes(
        || (0u64, 0u64),
        |acc, p| {
            acc.1 += 1;
            if zeck_expand(p).bits() & mask == want {
                acc.0 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    Ok(hits as f64 / total as f64)
}

/// Counts of the digit window `δ_lo … δ_hi` over `0 ≤ n < x`, indexed by
/// the window read as a binary number with `δ_lo` as the lowest bit.
pub fn window_histogram_integers(x: u64, lo: usize, hi: usize) -> Result<Vec<u64>> {
    if !(2 <= lo && lo <= hi && hi - lo < 20 && hi <= MAX_FIB_INDEX) {
        return Err(Error::OutOfRange(format!("window [{lo}, {hi}] invalid")));
    }
    let width = hi - lo + 1;
    let mask = (1u128 << width) - 1;
    let chunk = 1u64 << 16;
    let parts: Vec<Vec<u64>> = (0..x.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut h = vec![0u64; 1 << width];
            for n in c * chunk..((c + 1) * chunk).min(x) {
                h[((zeck_expand(n).bits() >> lo) & mask) as usize] += 1;
            }
            h
        })
        .collect();
    Ok(merge_histograms(parts, 1 << width))
}

fn merge_histograms(parts: Vec<Vec<u64>>, len: usize) -> Vec<u64> {
    parts.into_iter().fold(vec![0u64; len], |mut acc, h| {
        for (a, b) in acc.iter_mut().zip(h) {
            *a += b;
        }
        acc
    })
}
