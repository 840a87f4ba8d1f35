//! Reading Zeckendorf digits from torus positions.
//!
//! The low digits of `n` are determined by the position of `nφ` modulo 1
//! (one wrapped interval per admissible low part), and windows of digits are
//! determined by `(n/φ^b, n/φ^{b+1})` modulo `Z²` lying in a parallelogram.
//! All membership decisions are exact; doubles only preselect candidates.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::golden::{GoldenInt, GoldenRational};
use crate::numeration::{fib_u64, zeck_expand, MAX_FIB_INDEX};

const SCREEN_EPS: f64 = 1e-9;

fn fib_checked(k: usize) -> Result<u64> {
    fib_u64(k).ok_or_else(|| Error::OutOfRange(format!("index {k} exceeds 93")))
}

fn gi(a: i64, b: i64) -> GoldenInt {
    GoldenInt::new(a, b)
}

/// `frac(n φ^k)` for an integer `n`.
pub fn frac_n_phi_pow(n: u64, k: i64) -> GoldenInt {
    GoldenInt::phi_pow(k).scale(&BigInt::from(n)).frac()
}

/// An interval of the torus given by real endpoints `left < right` with
/// `right - left ≤ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrappedInterval {
    pub left: GoldenInt,
    pub right: GoldenInt,
    pub left_open: bool,
    pub right_open: bool,
    left_frac: GoldenInt,
    len: GoldenInt,
}

impl WrappedInterval {
    pub fn new(left: GoldenInt, right: GoldenInt, left_open: bool, right_open: bool) -> Result<Self> {
        let len = &right - &left;
        if len.signum() <= 0 || (&len - &GoldenInt::one()).signum() > 0 {
            return Err(Error::InvalidArgument(format!(
                "interval length {len} outside (0, 1]"
            )));
        }
        let left_frac = left.frac();
        Ok(WrappedInterval { left, right, left_open, right_open, left_frac, len })
    }

    pub fn open(left: GoldenInt, right: GoldenInt) -> Result<Self> {
        Self::new(left, right, true, true)
    }

    pub fn length(&self) -> &GoldenInt {
        &self.len
    }

    /// Left endpoint reduced to `[0, 1)`.
    pub fn left_frac(&self) -> &GoldenInt {
        &self.left_frac
    }

    /// Exact membership of `x mod 1`.
    pub fn contains(&self, x: &GoldenInt) -> bool {
        self.contains_reduced(&x.frac())
    }

    /// Exact membership for `x` already in `[0, 1)`.
    pub fn contains_reduced(&self, x: &GoldenInt) -> bool {
        let mut d = x - &self.left_frac;
        if d.signum() < 0 {
            d += &GoldenInt::one();
        }
        // d is the offset of x from the left endpoint, in [0, 1)
        let from_left = d.signum();
        if from_left == 0 {
            // x sits on the left endpoint, or on the right one when len = 1
            let full = (&self.len - &GoldenInt::one()).signum() == 0;
            return !self.left_open || (full && !self.right_open);
        }
        match (&d - &self.len).signum() {
            -1 => true,
            0 => !self.right_open,
            _ => false,
        }
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        let l = self.left_frac.to_f64();
        (l, l + self.len.to_f64())
    }
}

/// `A_λ(u)`: the open interval of `nφ mod 1` for integers `n` whose digits
/// below index `λ` have value `u`.
pub fn interval_for_lowdigits(lambda: usize, u: u64) -> Result<WrappedInterval> {
    if !(2..MAX_FIB_INDEX).contains(&lambda) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} outside 2..93")));
    }
    let f_l = fib_checked(lambda)?;
    if u >= f_l {
        return Err(Error::OutOfRange(format!("u = {u} not below F_{lambda} = {f_l}")));
    }
    let l = lambda as i64;
    let (lo, hi) = if u < fib_checked(lambda - 1)? {
        (-GoldenInt::phi_pow(-l + 1), GoldenInt::phi_pow(-l))
    } else {
        (-GoldenInt::phi_pow(-l - 1), GoldenInt::phi_pow(-l))
    };
    let (lo, hi) = if lambda % 2 == 0 { (lo, hi) } else { (-hi, -lo) };
    let centre = GoldenInt::new(0, u);
    WrappedInterval::open(&centre + &lo, &centre + &hi)
}

/// Detects `v(n, λ)` from `nφ mod 1` using the partition into `A_λ(u)`.
#[derive(Clone, Debug)]
pub struct LowDigitDetector {
    lambda: usize,
    intervals: Vec<WrappedInterval>,
    // (left endpoint as double, u), sorted
    order: Vec<(f64, u64)>,
}

impl LowDigitDetector {
    pub fn new(lambda: usize) -> Result<Self> {
        if !(2..=40).contains(&lambda) {
            return Err(Error::OutOfRange(format!("lambda = {lambda} outside 2..=40")));
        }
        let f_l = fib_checked(lambda)?;
        let intervals = (0..f_l)
            .map(|u| interval_for_lowdigits(lambda, u))
            .collect::<Result<Vec<_>>>()?;
        let mut order: Vec<(f64, u64)> = intervals
            .iter()
            .enumerate()
            .map(|(u, iv)| (iv.left_frac().to_f64(), u as u64))
            .collect();
        order.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(LowDigitDetector { lambda, intervals, order })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn intervals(&self) -> &[WrappedInterval] {
        &self.intervals
    }

    /// The unique `u` with `x mod 1 ∈ A_λ(u)`.
    pub fn locate(&self, x: &GoldenInt) -> Result<u64> {
        let x = x.frac();
        let xf = x.to_f64();
        let m = self.order.len();
        let pos = self.order.partition_point(|p| p.0 <= xf);
        let mut candidates = vec![self.order[m - 1].1];
        for off in [-2i64, -1, 0, 1] {
            let idx = pos as i64 + off;
            if (0..m as i64).contains(&idx) {
                candidates.push(self.order[idx as usize].1);
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let hits: Vec<u64> = candidates
            .into_iter()
            .filter(|&u| self.intervals[u as usize].contains_reduced(&x))
            .collect();
        if hits.len() == 1 {
            return Ok(hits[0]);
        }
        let all: Vec<u64> = (0..m as u64)
            .filter(|&u| self.intervals[u as usize].contains_reduced(&x))
            .collect();
        match all.as_slice() {
            [u] => Ok(*u),
            _ => Err(Error::Internal(format!(
                "{} intervals contain {x} at lambda = {}",
                all.len(),
                self.lambda
            ))),
        }
    }

    pub fn detect(&self, n: u64) -> Result<u64> {
        self.locate(&GoldenInt::new(0, n))
    }
}

/// `v(n, λ)` read off from `nφ mod 1`.
pub fn detect_lowdigits(n: u64, lambda: usize) -> Result<u64> {
    LowDigitDetector::new(lambda)?.detect(n)
}

/// Constraint `lo ≤ c₁x + c₂y ≤ hi` with per-side strictness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub c1: GoldenInt,
    pub c2: GoldenInt,
    pub lo: GoldenInt,
    pub hi: GoldenInt,
    pub lo_inclusive: bool,
    pub hi_inclusive: bool,
}

impl LinearConstraint {
    /// Half-open row `lo ≤ c₁x + c₂y < hi`.
    pub fn half_open(c1: GoldenInt, c2: GoldenInt, lo: GoldenInt, hi: GoldenInt) -> Self {
        LinearConstraint { c1, c2, lo, hi, lo_inclusive: true, hi_inclusive: false }
    }

    pub fn closed(c1: GoldenInt, c2: GoldenInt, lo: GoldenInt, hi: GoldenInt) -> Self {
        LinearConstraint { c1, c2, lo, hi, lo_inclusive: true, hi_inclusive: true }
    }

    pub fn eval(&self, x: &GoldenInt, y: &GoldenInt) -> GoldenInt {
        &(&self.c1 * x) + &(&self.c2 * y)
    }

    fn admits(&self, v: &GoldenInt) -> bool {
        let lo = (v - &self.lo).signum();
        let hi = (v - &self.hi).signum();
        let lo_ok = lo > 0 || (lo == 0 && self.lo_inclusive);
        let hi_ok = hi < 0 || (hi == 0 && self.hi_inclusive);
        lo_ok && hi_ok
    }

    fn f64_parts(&self) -> [f64; 4] {
        [self.c1.to_f64(), self.c2.to_f64(), self.lo.to_f64(), self.hi.to_f64()]
    }
}

/// Intersection of two strips with independent normals.
#[derive(Clone, Debug, PartialEq)]
pub struct Parallelogram {
    pub rows: [LinearConstraint; 2],
    screen: [[f64; 4]; 2],
    bbox: [f64; 4],
}

impl Parallelogram {
    pub fn new(r1: LinearConstraint, r2: LinearConstraint) -> Result<Self> {
        let det = &(&r1.c1 * &r2.c2) - &(&r1.c2 * &r2.c1);
        if det.is_zero() {
            return Err(Error::InvalidArgument("parallel constraints".into()));
        }
        if (&r1.hi - &r1.lo).signum() <= 0 || (&r2.hi - &r2.lo).signum() <= 0 {
            return Err(Error::InvalidArgument("empty strip".into()));
        }
        let s1 = r1.f64_parts();
        let s2 = r2.f64_parts();
        let d = s1[0] * s2[1] - s1[1] * s2[0];
        let mut bbox = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for p in [s1[2], s1[3]] {
            for q in [s2[2], s2[3]] {
                let x = (p * s2[1] - q * s1[1]) / d;
                let y = (q * s1[0] - p * s2[0]) / d;
                bbox[0] = bbox[0].min(x);
                bbox[1] = bbox[1].max(x);
                bbox[2] = bbox[2].min(y);
                bbox[3] = bbox[3].max(y);
            }
        }
        Ok(Parallelogram { rows: [r1, r2], screen: [s1, s2], bbox })
    }

    /// Exact area `Π(hi − lo) / |det|`.
    pub fn area(&self) -> GoldenRational {
        let [r1, r2] = &self.rows;
        let det = &(&r1.c1 * &r2.c2) - &(&r1.c2 * &r2.c1);
        let det = if det.signum() < 0 { -det } else { det };
        let widths = &(&r1.hi - &r1.lo) * &(&r2.hi - &r2.lo);
        GoldenRational::from_golden(widths)
            .div(&GoldenRational::from_golden(det))
            .expect("nonzero determinant")
    }

    /// Exact membership of a point of the plane.
    pub fn contains(&self, x: &GoldenInt, y: &GoldenInt) -> bool {
        self.rows.iter().all(|r| r.admits(&r.eval(x, y)))
    }

    /// Integer translates `(i, j)` with `(x + i, y + j)` inside.
    pub fn translates_containing(&self, x: &GoldenInt, y: &GoldenInt) -> Vec<(i64, i64)> {
        let xf = x.to_f64();
        let yf = y.to_f64();
        let i_lo = (self.bbox[0] - xf).floor() as i64 - 1;
        let i_hi = (self.bbox[1] - xf).ceil() as i64 + 1;
        let j_lo = (self.bbox[2] - yf).floor() as i64 - 1;
        let j_hi = (self.bbox[3] - yf).ceil() as i64 + 1;
        let mut out = Vec::new();
        for i in i_lo..=i_hi {
            for j in j_lo..=j_hi {
                let (px, py) = (xf + i as f64, yf + j as f64);
                let plausible = self.screen.iter().all(|s| {
                    let v = s[0] * px + s[1] * py;
                    let tol = SCREEN_EPS * (1.0 + s[0].abs() + s[1].abs()) * (1.0 + px.abs() + py.abs());
                    v >= s[2] - tol && v <= s[3] + tol
                });
                if !plausible {
                    continue;
                }
                let ex = x + &GoldenInt::from_int(i);
                let ey = y + &GoldenInt::from_int(j);
                if self.contains(&ex, &ey) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Exact membership of `(x, y) mod Z²`.
    pub fn contains_mod1(&self, x: &GoldenInt, y: &GoldenInt) -> bool {
        !self.translates_containing(x, y).is_empty()
    }
}

fn alpha_for(u_low: bool) -> GoldenInt {
    if u_low {
        // -φ
        gi(0, -1)
    } else {
        // -1/φ = 1 - φ
        gi(1, -1)
    }
}

/// `B_λ(u)`: `u ≤ F_{λ+1}x + F_λ y < u + 1` and `α_u ≤ -x/φ + y < 1`,
/// where `α_u = -φ` for `u < F_{λ-1}` and `-1/φ` otherwise.
pub fn parallelogram_b(lambda: usize, u: u64) -> Result<Parallelogram> {
    if !(2..MAX_FIB_INDEX).contains(&lambda) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} outside 2..93")));
    }
    let f_l = fib_checked(lambda)?;
    if u >= f_l {
        return Err(Error::OutOfRange(format!("u = {u} not below F_{lambda} = {f_l}")));
    }
    let alpha = alpha_for(u < fib_checked(lambda - 1)?);
    strip_pair(lambda, GoldenInt::new(u, 0), GoldenInt::new(u + 1, 0), alpha)
}

fn strip_pair(lambda: usize, lo: GoldenInt, hi: GoldenInt, alpha: GoldenInt) -> Result<Parallelogram> {
    let s_row = LinearConstraint::half_open(
        GoldenInt::new(fib_checked(lambda + 1)?, 0),
        GoldenInt::new(fib_checked(lambda)?, 0),
        lo,
        hi,
    );
    let t_row = LinearConstraint::half_open(gi(1, -1), GoldenInt::one(), alpha, GoldenInt::one());
    Parallelogram::new(s_row, t_row)
}

/// The torus point `(frac(n/φ^λ), frac(n/φ^{λ+1}))`.
pub fn torus_point(n: u64, lambda: usize) -> (GoldenInt, GoldenInt) {
    let l = lambda as i64;
    (frac_n_phi_pow(n, -l), frac_n_phi_pow(n, -l - 1))
}

/// Detects `v(n, λ)` from `(n/φ^λ, n/φ^{λ+1}) mod Z²`.
///
/// With `s = F_{λ+1}x + F_λ y` and `t = -x/φ + y` the point has `s = n`,
/// `t = 0`, so each translate by `(i, j)` moves `s` by an integer. The
/// matching translate gives `u = ⌊s⌋`.
pub fn detect_via_b(n: u64, lambda: usize) -> Result<u64> {
    if !(2..MAX_FIB_INDEX - 1).contains(&lambda) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} outside 2..92")));
    }
    let (x, y) = torus_point(n, lambda);
    let f_l = fib_checked(lambda)?;
    let f_lm1 = fib_checked(lambda - 1)?;
    let f_lp1 = fib_checked(lambda + 1)?;
    let s_row = [f_lp1 as f64, f_l as f64];
    let xf = x.to_f64();
    let yf = y.to_f64();
    let one_minus_phi = gi(1, -1);
    let mut found = Vec::new();
    for i in -2i64..=2 {
        for j in -3i64..=2 {
            let tf = (1.0 - crate::golden::PHI) * (xf + i as f64) + yf + j as f64;
            if !(-1.7..=1.1).contains(&tf) {
                continue;
            }
            let sf = s_row[0] * (xf + i as f64) + s_row[1] * (yf + j as f64);
            if sf < -1.0 - 1e-6 * f_l as f64 || sf > f_l as f64 * (1.0 + 1e-6) + 1.0 {
                continue;
            }
            let px = &x + &GoldenInt::from_int(i);
            let py = &y + &GoldenInt::from_int(j);
            let s = &(&GoldenInt::new(f_lp1, 0) * &px) + &(&GoldenInt::new(f_l, 0) * &py);
            let u = s.floor();
            let Some(u) = u.to_u64().filter(|&u| u < f_l) else {
                continue;
            };
            let t = &(&one_minus_phi * &px) + &py;
            let alpha = alpha_for(u < f_lm1);
            if (&t - &alpha).signum() >= 0 && (&t - &GoldenInt::one()).signum() < 0 {
                found.push(u);
            }
        }
    }
    match found.as_slice() {
        [u] => Ok(*u),
        _ => Err(Error::Internal(format!(
            "{} parallelograms contain the point of n = {n} at lambda = {lambda}",
            found.len()
        ))),
    }
}

/// A digit window `ν_a … ν_{b-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitBlock {
    pub a: usize,
    pub b: usize,
    pub nu: Vec<u8>,
}

impl DigitBlock {
    pub fn new(a: usize, b: usize, nu: Vec<u8>) -> Result<Self> {
        if !(2 <= a && a < b && b < MAX_FIB_INDEX - 1) {
            return Err(Error::OutOfRange(format!("block [{a}, {b}) invalid")));
        }
        if nu.len() != b - a || nu.iter().any(|&d| d > 1) {
            return Err(Error::InvalidDigits("block digits must be b - a bits".into()));
        }
        if nu.windows(2).any(|w| w[0] == 1 && w[1] == 1) {
            return Err(Error::InvalidDigits("adjacent ones".into()));
        }
        Ok(DigitBlock { a, b, nu })
    }

    fn digit(&self, j: usize) -> u8 {
        self.nu[j - self.a]
    }

    /// `M = Σ ν_j F_j`.
    pub fn m(&self) -> u64 {
        (self.a..self.b).filter(|&j| self.digit(j) == 1).map(|j| fib_u64(j).unwrap()).sum()
    }

    /// `W = F_a` if `ν_a = 0`, else `F_{a-1}`.
    pub fn w(&self) -> u64 {
        if self.digit(self.a) == 0 {
            fib_u64(self.a).unwrap()
        } else {
            fib_u64(self.a - 1).unwrap()
        }
    }

    /// `α = -φ` if `ν_{b-1} = 0`, else `-1/φ`.
    pub fn alpha(&self) -> GoldenInt {
        alpha_for(self.digit(self.b - 1) == 0)
    }
}

/// The parallelogram `M ≤ F_{b+1}x + F_b y < M + W`, `α ≤ -x/φ + y < 1`.
pub fn block_parallelogram(block: &DigitBlock) -> Result<Parallelogram> {
    let m = block.m();
    strip_pair(
        block.b,
        GoldenInt::new(m, 0),
        GoldenInt::new(m + block.w(), 0),
        block.alpha(),
    )
}

/// Whether `(n/φ^b, n/φ^{b+1}) mod Z²` lies in the block parallelogram.
pub fn detect_block(n: u64, block: &DigitBlock) -> Result<bool> {
    let p = block_parallelogram(block)?;
    let (x, y) = torus_point(n, block.b);
    Ok(p.contains_mod1(&x, &y))
}

/// Direct digit comparison `δ_j(n) = ν_j` for `a ≤ j < b`.
pub fn block_matches(n: u64, block: &DigitBlock) -> bool {
    let d = zeck_expand(n);
    (block.a..block.b).all(|j| d.digit(j) == block.digit(j))
}

/// The tiling rectangles, scaled by `φ + 2`.
#[derive(Clone, Debug)]
pub struct Tiling {
    pub a1: Parallelogram,
    pub a0: Parallelogram,
}

impl Tiling {
    pub fn new() -> Self {
        let c = (gi(2, 1), gi(-1, -3));
        let d = (gi(1, 3), gi(2, 1));
        let a1 = Parallelogram::new(
            LinearConstraint::closed(c.0.clone(), c.1.clone(), gi(1, -2), gi(2, 1)),
            LinearConstraint::closed(d.0.clone(), d.1.clone(), gi(2, 1), gi(1, 3)),
        )
        .expect("independent rows");
        let a0 = Parallelogram::new(
            LinearConstraint::closed(c.0, c.1, gi(-1, -3), gi(2, 1)),
            LinearConstraint::closed(d.0, d.1, gi(0, 0), gi(2, 1)),
        )
        .expect("independent rows");
        Tiling { a1, a0 }
    }

    /// 1 if the point lies in `A₁ mod Z²` (boundary included), else 0.
    pub fn classify(&self, x1: &GoldenInt, x2: &GoldenInt) -> u8 {
        u8::from(self.a1.contains_mod1(x1, x2))
    }
}

impl Default for Tiling {
    fn default() -> Self {
        Self::new()
    }
}

/// Tiling class of a torus point.
pub fn tiling_classify(x1: &GoldenInt, x2: &GoldenInt) -> u8 {
    Tiling::new().classify(x1, x2)
}

/// Fraction of `n < N` whose tiling class at `({nφ^{-k}}, {nφ^{-k-1}})`
/// differs from `δ_k(n)`.
pub fn tiling_error_rate(k: usize, big_n: u64) -> Result<f64> {
    if !(2..MAX_FIB_INDEX).contains(&k) || big_n == 0 {
        return Err(Error::OutOfRange(format!("k = {k}, N = {big_n}")));
    }
    let tiling = Tiling::new();
    let kk = k as i64;
    let p1 = GoldenInt::phi_pow(-kk);
    let p2 = GoldenInt::phi_pow(-kk - 1);
    let errors = (0..big_n)
        .into_par_iter()
        .filter(|&n| {
            let nb = BigInt::from(n);
            let x1 = p1.scale(&nb).frac();
            let x2 = p2.scale(&nb).frac();
            tiling.classify(&x1, &x2) != zeck_expand(n).digit(k)
        })
        .count();
    Ok(errors as f64 / big_n as f64)
}

/// Error rates over a range of `k` with the fitted constant
/// `C = max_k rate·φ^k` and the least-squares slope of `ln rate` in `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TilingFit {
    pub rates: Vec<(usize, f64)>,
    pub constant: f64,
    pub slope: f64,
}

pub fn tiling_error_fit(ks: std::ops::RangeInclusive<usize>, big_n: u64) -> Result<TilingFit> {
    let rates = ks
        .map(|k| tiling_error_rate(k, big_n).map(|r| (k, r)))
        .collect::<Result<Vec<_>>>()?;
    let constant = rates
        .iter()
        .map(|&(k, r)| r * crate::golden::PHI.powi(k as i32))
        .fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = rates
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(k, r)| (k as f64, r.ln()))
        .collect();
    Ok(TilingFit { rates, constant, slope: least_squares_slope(&pts) })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
