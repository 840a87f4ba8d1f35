//! Step functions on the torus, Zeckendorf Fourier analysis, Gowers norms,
//! discrepancy and trigonometric approximation.

pub mod discrepancy;
pub mod fourier;
pub mod gowers;
pub mod inequalities;
pub mod stepfn;
pub mod vaaler;

use num_complex::Complex64;

pub use stepfn::{build_g_lambda, StepFn};

/// `e(x) = exp(2πix)`.
pub fn e(x: f64) -> Complex64 {
    let r = x - x.floor();
    Complex64::from_polar(1.0, std::f64::consts::TAU * r)
}

/// `‖x‖`, the distance to the nearest integer.
pub fn dist_to_int(x: f64) -> f64 {
    let r = x - x.floor();
    r.min(1.0 - r)
}
