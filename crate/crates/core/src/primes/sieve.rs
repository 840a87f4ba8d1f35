//! Segmented, odd-only, bit-packed sieve of Eratosthenes.
//!
//! Segments are sieved in parallel. Per-segment results are merged in
//! ascending segment order, so floating sums do not depend on the number of
//! worker threads.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Odd numbers per segment.
const SEGMENT_BITS: u64 = 1 << 18;
/// Default memory budget in bytes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

static MEMORY_BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_MEMORY_BUDGET);

/// Sets the budget used by [`PrimeSieve::new`].
pub fn set_memory_budget(bytes: u64) {
    MEMORY_BUDGET.store(bytes, Ordering::Relaxed);
}

pub fn memory_budget() -> u64 {
    MEMORY_BUDGET.load(Ordering::Relaxed)
}

#[derive(Clone, Debug)]
pub struct PrimeSieve {
    limit: u64,
    base: Vec<u32>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, memory_budget())
    }

    /// Fails with [`Error::ResourceLimit`] when the estimated working set
    /// exceeds `budget` bytes.
    pub fn with_budget(limit: u64, budget: u64) -> Result<Self> {
        if limit > i64::MAX as u64 {
            return Err(Error::OutOfRange("limit above 2^63 - 1".into()));
        }
        let root = limit.isqrt();
        let base_bits = root / 2 + 1;
        let base_primes = if root < 3 {
            0.0
        } else {
            1.3 * root as f64 / (root as f64).ln()
        };
        let threads = rayon::current_num_threads() as u64;
        let estimate = base_bits / 8 + (base_primes as u64) * 4 + threads * (SEGMENT_BITS / 8) * 2;
        if estimate > budget {
            return Err(Error::ResourceLimit(format!(
                "sieving to {limit} needs about {estimate} bytes, budget is {budget}"
            )));
        }
        Ok(PrimeSieve { limit, base: odd_primes_upto(root) })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn segment_count(&self) -> u64 {
        if self.limit < 2 {
            0
        } else {
            (self.limit / 2) / SEGMENT_BITS + 1
        }
    }

    /// Primes of segment `s` in increasing order.
    fn segment_primes(&self, s: u64, out: &mut Vec<u64>) {
        out.clear();
        // bit i of segment s stands for 2(s·B + i) + 1
        let first = s * SEGMENT_BITS;
        let last = ((s + 1) * SEGMENT_BITS).min(self.limit.saturating_sub(1) / 2 + 1);
        if first >= last {
            return;
        }
        let len = (last - first) as usize;
        let mut words = vec![0u64; len.div_ceil(64)];
        for &p in &self.base {
            let p = p as u64;
            let sq = p * p;
            if sq > 2 * last + 1 {
                break;
            }
            // first odd multiple of p that is ≥ max(p², segment start)
            let lo = 2 * first + 1;
            let mut m = if sq >= lo { sq } else { lo.div_ceil(p) * p };
            if m % 2 == 0 {
                m += p;
            }
            let mut i = (m - 1) / 2 - first;
            while i < len as u64 {
                words[(i / 64) as usize] |= 1 << (i % 64);
                i += p;
            }
        }
        if s == 0 && self.limit >= 2 {
            out.push(2);
            // 1 is not prime
            words[0] |= 1;
        }
        for (w, &word) in words.iter().enumerate() {
            let mut free = !word;
            while free != 0 {
                let b = free.trailing_zeros() as u64;
                let i = w as u64 * 64 + b;
                if i >= len as u64 {
                    break;
                }
                out.push(2 * (first + i) + 1);
                free &= free - 1;
            }
        }
    }

    /// Folds every prime `p ≤ limit` into per-segment accumulators and merges
    /// them in ascending segment order.
    pub fn fold_primes<T, I, F, M>(&self, init: I, fold: F, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(&mut T, u64) + Sync + Send,
        M: Fn(T, T) -> T,
    {
        let parts: Vec<T> = (0..self.segment_count())
            .into_par_iter()
            .map_init(Vec::new, |buf, s| {
                self.segment_primes(s, buf);
                let mut acc = init();
                for &p in buf.iter() {
                    fold(&mut acc, p);
                }
                acc
            })
            .collect();
        parts.into_iter().fold(init(), merge)
    }

    pub fn primes(&self) -> Vec<u64> {
        self.fold_primes(
            Vec::new,
            |v, p| v.push(p),
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        )
    }

    pub fn count(&self) -> u64 {
        self.fold_primes(|| 0u64, |c, _| *c += 1, |a, b| a + b)
    }
}

/// Odd primes up to `n` by a plain odd-only sieve.
fn odd_primes_upto(n: u64) -> Vec<u32> {
    if n < 3 {
        return Vec::new();
    }
    let bits = (n - 1) / 2 + 1;
    let mut comp = vec![0u64; bits.div_ceil(64) as usize];
    let mut i = 1u64;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if comp[(i / 64) as usize] >> (i % 64) & 1 == 0 {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j < bits {
                comp[(j / 64) as usize] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }
    (1..bits)
        .filter(|&i| comp[(i / 64) as usize] >> (i % 64) & 1 == 0)
        .map(|i| (2 * i + 1) as u32)
        .collect()
}

/// All primes `≤ x` in increasing order.
pub fn primes_upto(x: u64) -> Result<Vec<u64>> {
    Ok(PrimeSieve::new(x)?.primes())
}

/// `π(x)`.
pub fn pi(x: u64) -> Result<u64> {
    Ok(PrimeSieve::new(x)?.count())
}
