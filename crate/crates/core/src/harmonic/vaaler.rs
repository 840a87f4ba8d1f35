//! Trigonometric majorant/minorant envelopes for indicators of arcs.
//!
//! For `I = [a, b]` of length `ℓ`, `A` damps the Fourier series of `χ_I`
//! with Vaaler's weights `Ĵ(h/(H+1))`, and `B` is the matching sum of two
//! Fejér kernels centred at the endpoints, so that `|χ_I - A| ≤ B`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::e;
use crate::error::{Error, Result};

/// `Σ_{|h| ≤ H} c_h e(hx)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Coefficients listed for `h = -H, …, H`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidArgument("need 2H + 1 coefficients".into()));
        }
        Ok(TrigPoly { degree: coeffs.len() / 2, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `c_h`, zero outside `|h| ≤ H`.
    pub fn coeff(&self, h: i64) -> Complex64 {
        let i = h + self.degree as i64;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn eval_complex(&self, x: f64) -> Complex64 {
        let step = e(x);
        let mut z = e(-(self.degree as f64) * x);
        let mut s = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            s += c * z;
            z *= step;
        }
        s
    }

    /// Real part of the value; the envelopes below are real-valued.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_complex(x).re
    }

    /// `c_0`, the mean over one period.
    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }
}

/// Vaaler's weight `Ĵ(u) = πu(1-u)cot(πu) + u` for `0 < u < 1`.
fn vaaler_weight(u: f64) -> f64 {
    PI * u * (1.0 - u) / (PI * u).tan() + u
}

/// `(A_{I,H}, B_{I,H})` for `I = [a, b]`.
pub fn vaaler(a: f64, b: f64, h: usize) -> Result<(TrigPoly, TrigPoly)> {
    let len = b - a;
    if !(len > 0.0 && len < 1.0) || h == 0 {
        return Err(Error::InvalidArgument(format!("degenerate interval [{a}, {b}] or H = 0")));
    }
    let hp1 = (h + 1) as f64;
    let mut ac = Vec::with_capacity(2 * h + 1);
    let mut bc = Vec::with_capacity(2 * h + 1);
    for k in -(h as i64)..=(h as i64) {
        let kf = k as f64;
        if k == 0 {
            ac.push(Complex64::new(len, 0.0));
        } else {
            let chi = (e(-kf * a) - e(-kf * b)) / Complex64::new(0.0, 2.0 * PI * kf);
            ac.push(chi * vaaler_weight(kf.abs() / hp1));
        }
        let fejer = 1.0 - kf.abs() / hp1;
        bc.push((e(-kf * a) + e(-kf * b)) * (fejer / (2.0 * hp1)));
    }
    Ok((TrigPoly::new(ac)?, TrigPoly::new(bc)?))
}
