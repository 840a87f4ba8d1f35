//! One-periodic piecewise-constant complex functions.
//!
//! A step function is a sorted list of breakpoints in `[0, 1)` together with
//! the value taken on the arc starting at each breakpoint; the last arc wraps
//! around to the first breakpoint. Functions built from `Z[φ]` positions keep
//! the exact breakpoints as well, so they can be evaluated exactly at points
//! of `Z[φ]`.

use num_complex::Complex64;

use crate::detection::interval_for_lowdigits;
use crate::error::{Error, Result};
use crate::golden::GoldenInt;
use crate::numeration::{fib_u64, sz};

#[derive(Clone, Debug, PartialEq)]
pub struct StepFn {
    bps: Vec<f64>,
    vals: Vec<Complex64>,
    exact: Option<Vec<GoldenInt>>,
}

impl StepFn {
    pub fn new(bps: Vec<f64>, vals: Vec<Complex64>) -> Result<Self> {
        if bps.is_empty() || bps.len() != vals.len() {
            return Err(Error::InvalidArgument("need one value per breakpoint".into()));
        }
        if bps.iter().any(|b| !(0.0..1.0).contains(b)) {
            return Err(Error::InvalidArgument("breakpoints must lie in [0, 1)".into()));
        }
        if bps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("breakpoints must increase strictly".into()));
        }
        Ok(StepFn { bps, vals, exact: None })
    }

    /// Step function with breakpoints given exactly; positions are reduced
    /// mod 1 and sorted.
    pub fn from_exact(points: Vec<(GoldenInt, Complex64)>) -> Result<Self> {
        let mut pts: Vec<(GoldenInt, Complex64)> =
            points.into_iter().map(|(p, v)| (p.frac(), v)).collect();
        pts.sort_by(|p, q| p.0.cmp(&q.0));
        if pts.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("repeated breakpoint".into()));
        }
        let bps: Vec<f64> = pts.iter().map(|p| p.0.to_f64()).collect();
        let vals = pts.iter().map(|p| p.1).collect();
        let mut f = StepFn::new(bps, vals)?;
        f.exact = Some(pts.into_iter().map(|p| p.0).collect());
        Ok(f)
    }

    pub fn constant(c: Complex64) -> Self {
        StepFn { bps: vec![0.0], vals: vec![c], exact: Some(vec![GoldenInt::zero()]) }
    }

    pub fn num_arcs(&self) -> usize {
        self.bps.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.bps
    }

    pub fn exact_breakpoints(&self) -> Option<&[GoldenInt]> {
        self.exact.as_deref()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.vals
    }

    /// `(start, length, value)` for each arc.
    pub fn arcs(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        let m = self.bps.len();
        (0..m).map(move |i| {
            let end = if i + 1 < m { self.bps[i + 1] } else { self.bps[0] + 1.0 };
            (self.bps[i], end - self.bps[i], self.vals[i])
        })
    }

    fn arc_index(&self, x: f64) -> usize {
        let r = x - x.floor();
        let pos = self.bps.partition_point(|&b| b <= r);
        if pos == 0 {
            self.bps.len() - 1
        } else {
            pos - 1
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.vals[self.arc_index(x)]
    }

    /// Exact evaluation at `x mod 1`; needs exact breakpoints.
    pub fn eval_exact(&self, x: &GoldenInt) -> Result<Complex64> {
        let ex = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("no exact breakpoints".into()))?;
        let r = x.frac();
        let pos = ex.partition_point(|b| b <= &r);
        let i = if pos == 0 { ex.len() - 1 } else { pos - 1 };
        Ok(self.vals[i])
    }

    /// `∫₀¹ f`.
    pub fn integral(&self) -> Complex64 {
        self.arcs().map(|(_, len, v)| v * len).sum()
    }

    pub fn map(&self, g: impl Fn(Complex64) -> Complex64) -> StepFn {
        StepFn { bps: self.bps.clone(), vals: self.vals.iter().map(|&v| g(v)).collect(), exact: self.exact.clone() }
    }

    pub fn conj(&self) -> StepFn {
        self.map(|v| v.conj())
    }

    /// `x ↦ f(x + t)`.
    pub fn rotate(&self, t: f64) -> StepFn {
        let t = t - t.floor();
        let mut pts: Vec<(f64, Complex64)> = self
            .bps
            .iter()
            .zip(&self.vals)
            .map(|(&b, &v)| {
                let mut s = b - t;
                if s < 0.0 {
                    s += 1.0;
                }
                if s >= 1.0 {
                    s -= 1.0;
                }
                (s, v)
            })
            .collect();
        pts.sort_by(|p, q| p.0.total_cmp(&q.0));
        pts.dedup_by(|q, p| q.0 == p.0);
        StepFn { bps: pts.iter().map(|p| p.0).collect(), vals: pts.iter().map(|p| p.1).collect(), exact: None }
    }

    /// `x ↦ f(x + t)` for an exact offset, keeping exact breakpoints.
    pub fn rotate_exact(&self, t: &GoldenInt) -> Result<StepFn> {
        let ex = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("no exact breakpoints".into()))?;
        StepFn::from_exact(ex.iter().map(|b| b - t).zip(self.vals.iter().copied()).collect())
    }

    /// Pointwise product on the common refinement.
    pub fn product(&self, other: &StepFn) -> StepFn {
        let mut bps: Vec<f64> = self.bps.iter().chain(&other.bps).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let vals = bps.iter().map(|&b| self.eval(b) * other.eval(b)).collect();
        StepFn { bps, vals, exact: None }
    }

    /// Sum of jump magnitudes around the circle.
    pub fn total_variation(&self) -> f64 {
        let m = self.vals.len();
        (0..m).map(|i| (self.vals[i] - self.vals[(i + m - 1) % m]).norm()).sum()
    }

    /// `∫ f(x) conj(f(x + t)) dx`.
    pub fn correlation(&self, t: f64) -> Complex64 {
        self.product(&self.rotate(t).conj()).integral()
    }

    /// `∫ f(x) conj(f(x + t)) dx` for an exact offset.
    pub fn correlation_exact(&self, t: &GoldenInt) -> Result<Complex64> {
        Ok(self.product(&self.rotate_exact(t)?.conj()).integral())
    }

    /// Multiplicative derivative `x ↦ f(x) conj(f(x + z))`.
    pub fn derivative(&self, z: f64) -> StepFn {
        self.product(&self.rotate(z).conj())
    }
}

/// Largest `λ` accepted by [`build_g_lambda`].
pub const G_LAMBDA_MAX: usize = 25;

/// `g_λ`: the value `sz(u)` on each arc `A_λ(u)`.
pub fn build_g_lambda(lambda: usize) -> Result<StepFn> {
    if !(2..=G_LAMBDA_MAX).contains(&lambda) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} outside 2..=25")));
    }
    let f_l = fib_u64(lambda).unwrap();
    let pts = (0..f_l)
        .map(|u| {
            let iv = interval_for_lowdigits(lambda, u)?;
            Ok((iv.left_frac().clone(), Complex64::new(sz(u) as f64, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    StepFn::from_exact(pts)
}

/// `e(ϑ g_λ)`.
pub fn build_e_theta_g(lambda: usize, theta: f64) -> Result<StepFn> {
    Ok(build_g_lambda(lambda)?.map(|v| super::e(theta * v.re)))
}
