//! Zeckendorf numeration, exact arithmetic in `Z[φ]`, torus digit detection,
//! the Markov digit model, Zeckendorf Fourier and Gowers analytics,
//! discrepancy tools and experiments on the digit sums of primes.

pub mod config;
pub mod detection;
pub mod error;
pub mod golden;
pub mod harmonic;
pub mod markov;
pub mod numeration;
pub mod primes;
pub mod report;

pub use error::{Error, Result};
pub use golden::{GoldenInt, GoldenRational};
pub use numeration::{fib, sz, sz_trunc, v, zeck_expand, zeck_value, ZeckDigits};
