//! Prime generation and experiments on the digit sums of primes.

pub mod experiments;
pub mod primality;
pub mod sieve;

pub use experiments::*;
pub use primality::{is_prime_u64, is_probable_prime};
pub use sieve::{pi, primes_upto, PrimeSieve};
