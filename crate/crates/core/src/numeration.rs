//! Fibonacci numbers and the Zeckendorf numeration system.
//!
//! Every nonnegative integer `n` has a unique expansion `n = Σ δ_k F_k`
//! over indices `k ≥ 2` with digits in `{0, 1}` and no two adjacent ones.
//! Integers handled here are `u64`; Fibonacci values themselves are
//! available at arbitrary precision through [`fib`].

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest index `k` with `F_k` representable as `u64`.
pub const MAX_FIB_INDEX: usize = 93;

const fn fib_table() -> [u64; MAX_FIB_INDEX + 1] {
    let mut t = [0u64; MAX_FIB_INDEX + 1];
    t[1] = 1;
    let mut k = 2;
    while k <= MAX_FIB_INDEX {
        t[k] = t[k - 1] + t[k - 2];
        k += 1;
    }
    t
}

/// `FIB[k] = F_k` for `0 ≤ k ≤ 93`.
pub static FIB: [u64; MAX_FIB_INDEX + 1] = fib_table();

/// `F_k` at arbitrary precision.
pub fn fib(k: usize) -> BigUint {
    if k <= MAX_FIB_INDEX {
        return BigUint::from(FIB[k]);
    }
    let mut a = BigUint::from(FIB[MAX_FIB_INDEX - 1]);
    let mut b = BigUint::from(FIB[MAX_FIB_INDEX]);
    for _ in MAX_FIB_INDEX..k {
        let c = &a + &b;
        a = b;
        b = c;
    }
    b
}

/// `(F_{k-1}, F_k)` at arbitrary precision, with `F_{-1} = 1`.
pub fn fib_pair(k: usize) -> (BigUint, BigUint) {
    if k == 0 {
        return (BigUint::one(), BigUint::zero());
    }
    let mut a = BigUint::zero();
    let mut b = BigUint::one();
    for _ in 1..k {
        let c = &a + &b;
        a = b;
        b = c;
    }
    (a, b)
}

/// `F_k` as `u64`, `None` past index 93.
pub fn fib_u64(k: usize) -> Option<u64> {
    FIB.get(k).copied()
}

/// Zeckendorf digit string of a `u64`. Bit `k` of the mask is `δ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ZeckDigits {
    bits: u128,
}

impl ZeckDigits {
    /// The empty expansion (of zero).
    pub const EMPTY: ZeckDigits = ZeckDigits { bits: 0 };

    /// Builds a digit string from a bit mask, rejecting adjacent ones and
    /// indices outside `2..=93`.
    pub fn from_bits(bits: u128) -> Result<Self> {
        if bits & 0b11 != 0 || bits >> (MAX_FIB_INDEX + 1) != 0 {
            return Err(Error::InvalidDigits("digit index outside 2..=93".into()));
        }
        if bits & (bits >> 1) != 0 {
            return Err(Error::InvalidDigits("adjacent ones".into()));
        }
        Ok(ZeckDigits { bits })
    }

    /// Builds a digit string from the indices carrying a one.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u128;
        for &k in indices {
            if !(2..=MAX_FIB_INDEX).contains(&k) {
                return Err(Error::InvalidDigits(format!("index {k} outside 2..=93")));
            }
            bits |= 1u128 << k;
        }
        Self::from_bits(bits)
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// `δ_k`.
    pub fn digit(&self, k: usize) -> u8 {
        if k > 127 {
            0
        } else {
            ((self.bits >> k) & 1) as u8
        }
    }

    /// Index of the leading one, 0 for the empty expansion.
    pub fn len(&self) -> usize {
        if self.bits == 0 {
            0
        } else {
            127 - self.bits.leading_zeros() as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    /// Number of ones.
    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Indices carrying a one, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (2..=MAX_FIB_INDEX).filter(move |&k| self.digit(k) == 1)
    }
}

/// Greedy Zeckendorf expansion.
pub fn zeck_expand(mut n: u64) -> ZeckDigits {
    let mut bits = 0u128;
    let mut k = MAX_FIB_INDEX;
    while n > 0 {
        while FIB[k] > n {
            k -= 1;
        }
        bits |= 1u128 << k;
        n -= FIB[k];
        k -= 1;
    }
    ZeckDigits { bits }
}

/// Value `Σ δ_k F_k` of a digit string.
pub fn zeck_value(d: &ZeckDigits) -> Result<u64> {
    d.indices().try_fold(0u64, |acc, k| {
        acc.checked_add(FIB[k])
            .ok_or_else(|| Error::InvalidDigits("value exceeds u64".into()))
    })
}

/// Zeckendorf sum of digits.
pub fn sz(mut n: u64) -> u32 {
    let mut count = 0;
    let mut k = MAX_FIB_INDEX;
    while n > 0 {
        while FIB[k] > n {
            k -= 1;
        }
        n -= FIB[k];
        count += 1;
        k -= 1;
    }
    count
}

/// `Σ_{2 ≤ k < λ} δ_k(n) F_k`, the value of the digits below index `λ`.
pub fn v(n: u64, lambda: usize) -> u64 {
    if lambda > MAX_FIB_INDEX {
        return n;
    }
    let mut rest = n;
    let mut k = MAX_FIB_INDEX;
    while rest > 0 && k >= lambda {
        if FIB[k] <= rest {
            rest -= FIB[k];
            // the next lower digit is forced to zero
            k = k.saturating_sub(2);
        } else {
            k -= 1;
        }
    }
    rest
}

/// Sum of digits restricted to indices `2 ≤ k < λ`.
pub fn sz_trunc(n: u64, lambda: usize) -> u32 {
    sz(v(n, lambda))
}

/// Smallest `y < F_ℓ` such that `n + y` has no ones below index `ℓ`.
///
/// The integers with vanishing low digits are spaced by `F_ℓ` or `F_{ℓ-1}`,
/// so the answer is the next such integer after `n - v(n, ℓ)`.
pub fn create_zero_shift(n: u64, ell: usize) -> Result<u64> {
    if !(2..MAX_FIB_INDEX).contains(&ell) {
        return Err(Error::OutOfRange(format!("ell = {ell} outside 2..93")));
    }
    let low = v(n, ell);
    if low == 0 {
        return Ok(0);
    }
    let base = n - low;
    let next = [FIB[ell - 1], FIB[ell]]
        .into_iter()
        .filter_map(|gap| base.checked_add(gap))
        .find(|&m| v(m, ell) == 0)
        .ok_or_else(|| Error::OutOfRange("shift overflows u64".into()))?;
    let y = next - n;
    assert!(y < FIB[ell], "zero-creating shift out of range");
    Ok(y)
}

/// Counts `0 ≤ n < N` for which the digit-sum difference `sz(n+r) - sz(n)`
/// differs from the truncated difference at level `λ`.
pub fn carry_mismatch_count(big_n: u64, r: u64, lambda: usize) -> u64 {
    use rayon::prelude::*;
    (0..big_n)
        .into_par_iter()
        .filter(|&n| {
            let full = sz(n + r) as i64 - sz(n) as i64;
            let trunc =
                sz_trunc(n + r, lambda) as i64 - sz_trunc(n, lambda) as i64;
            full != trunc
        })
        .count() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Letter {
    A,
    B,
    C,
    D,
}

/// First `len` symbols of the coded fixed point of
/// `a→ab, b→c, c→cd, d→a` with coding `a,d ↦ 0`, `b,c ↦ 1`.
/// The result equals `sz(n) mod 2` for `n < len`.
pub fn fibword_morphic(len: usize) -> Vec<u8> {
    use Letter::*;
    let mut word = vec![A];
    while word.len() < len {
        let mut next = Vec::with_capacity(word.len() * 2);
        for &c in &word {
            match c {
                A => next.extend([A, B]),
                B => next.push(C),
                C => next.extend([C, D]),
                D => next.push(A),
            }
        }
        word = next;
    }
    word.truncate(len);
    word.into_iter()
        .map(|c| match c {
            A | D => 0,
            B | C => 1,
        })
        .collect()
}

/// The first `count` integers whose digits `δ_2 … δ_{λ-1}` all vanish,
/// found by filtering the integers in order.
pub fn w_seq(lambda: usize, count: usize) -> Result<Vec<u64>> {
    if !(3..MAX_FIB_INDEX).contains(&lambda) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} outside 3..93")));
    }
    Ok((0u64..)
        .filter(|&n| v(n, lambda) == 0)
        .take(count)
        .collect())
}
