use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zecklab::golden::{gfloor, gnorm, gsign, isqrt};
use zecklab::harmonic::fourier::{block5_row_sum_norm, omega};
use zecklab::numeration::{fib_u64, w_seq};
use zecklab::{sz, zeck_expand, zeck_value, GoldenInt, ZeckDigits};

fn phi_256() -> BigRational {
    // ⌊2^256 φ⌋ / 2^256
    let scale = BigInt::one() << 256usize;
    let root5 = isqrt(&(BigInt::from(5) * &scale * &scale));
    BigRational::new((&scale + root5) / 2, scale)
}

fn big(x: i128) -> BigInt {
    BigInt::from(x)
}

fn delta(n: u64, l: usize) -> u8 {
    zeck_expand(n).digit(l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn expand_roundtrip(n in any::<u64>()) {
        let d = zeck_expand(n);
        prop_assert_eq!(zeck_value(&d).unwrap(), n);
        prop_assert_eq!(d.bits() & (d.bits() >> 1), 0);
        prop_assert_eq!(d.count_ones(), sz(n));
        prop_assert_eq!(ZeckDigits::from_bits(d.bits()).unwrap(), d);
    }

    #[test]
    fn shift_relation(lambda in 3usize..=25, frac in 0.0f64..1.0) {
        let f = fib_u64(lambda).unwrap();
        let f1 = fib_u64(lambda - 1).unwrap();
        let u = ((f as f64) * frac) as u64 % f;
        if u < f1 {
            prop_assert_eq!(sz(u + f), 1 + sz(u));
        } else {
            // u has digit λ-1, so adding F_λ carries
            prop_assert_eq!(sz(u + f), sz(u));
        }
    }

    #[test]
    fn multiples_of_fibonacci_support(k in 8usize..50, seed in any::<u64>()) {
        let cap = fib_u64(k - 3).unwrap();
        let m = 1 + seed % (cap - 1);
        let n = m * fib_u64(k).unwrap();
        let lm = (m as f64).ln() / zecklab::golden::PHI.ln();
        for l in 2..=93usize {
            let lf = l as f64;
            if lf < k as f64 - lm - 1.0 || lf > k as f64 + lm + 2.0 {
                prop_assert_eq!(delta(n, l), 0, "m={} k={} l={}", m, k, l);
            }
        }
    }

    #[test]
    fn sum_and_difference_support(
        n1 in 2usize..40, nw in 0usize..20, m1 in 2usize..40, mw in 0usize..20,
        sn in any::<u64>(), sm in any::<u64>(),
    ) {
        let pick = |lo: usize, width: usize, seed: u64| -> u64 {
            // random admissible digits inside [lo, lo + width], lowest one set
            let mut bits = 1u128 << lo;
            let mut k = lo + 2;
            let mut s = seed;
            while k <= lo + width {
                if s & 1 == 1 {
                    bits |= 1u128 << k;
                    k += 2;
                } else {
                    k += 1;
                }
                s >>= 1;
            }
            zeck_value(&ZeckDigits::from_bits(bits).unwrap()).unwrap()
        };
        let (n, m) = (pick(n1, nw, sn), pick(m1, mw, sm));
        let (n2, m2) = (zeck_expand(n).len(), zeck_expand(m).len());
        let lo = n1.min(m1) as i64 - 3;
        let hi = n2.max(m2) + 2;
        for x in [n + m, n.abs_diff(m)] {
            for l in 2..=93usize {
                if (l as i64) < lo || l > hi {
                    prop_assert_eq!(delta(x, l), 0);
                }
            }
        }
    }

    #[test]
    fn norm_is_multiplicative(a in any::<i64>(), b in any::<i64>(), c in any::<i64>(), d in any::<i64>()) {
        let x = GoldenInt::new(a, b);
        let y = GoldenInt::new(c, d);
        prop_assert_eq!(gnorm(&(&x * &y)), gnorm(&x) * gnorm(&y));
    }

    #[test]
    fn floor_brackets(a in any::<i128>(), b in any::<i128>()) {
        let x = GoldenInt::new(big(a), big(b));
        let f = GoldenInt::from_int(gfloor(&x));
        prop_assert!(gsign(&(&x - &f)) >= 0);
        prop_assert!(gsign(&(&(&f + &GoldenInt::one()) - &x)) > 0);
    }

    #[test]
    fn block_products_contract(lambda in 2usize..500, theta in 0.0f64..1.0, beta in -1.0f64..1.0) {
        prop_assert!(block5_row_sum_norm(lambda, theta, beta) <= 1.0 + 1e-12);
    }

    #[test]
    fn omega_symmetry(theta in 0.0f64..1.0, t in 0u64..50, n in 1u64..3000, lambda in 3usize..16) {
        let a = omega(theta, t, n, lambda).norm();
        let b = omega(-theta, t, n, lambda).norm();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a <= 1.0 + 1e-12);
    }
}

#[test]
fn sign_agrees_with_wide_floats() {
    let phi = phi_256();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tol = BigRational::new(BigInt::one(), BigInt::one() << 120usize);
    let mut decided = 0;
    for _ in 0..100_000 {
        let a = BigInt::from(rng.gen::<i128>()) >> rng.gen_range(0..128usize);
        let b = BigInt::from(rng.gen::<i128>()) >> rng.gen_range(0..128usize);
        let approx = BigRational::from_integer(a.clone()) + BigRational::from_integer(b.clone()) * &phi;
        if approx.abs() <= tol {
            continue;
        }
        decided += 1;
        let want = if approx.is_positive() { 1 } else if approx.is_zero() { 0 } else { -1 };
        assert_eq!(gsign(&GoldenInt::new(a, b)), want);
    }
    assert!(decided > 99_000);
}

#[test]
fn unique_admissible_representation() {
    // every admissible subset of {F_2, …, F_20} sums to a distinct value
    let mut seen = vec![0u32; 10_001];
    for mask in 0u32..(1 << 19) {
        if mask & (mask >> 1) != 0 {
            continue;
        }
        let total: u64 = (0..19).filter(|i| mask >> i & 1 == 1).map(|i| fib_u64(i + 2).unwrap()).sum();
        if total <= 10_000 {
            seen[total as usize] += 1;
            let bits = (mask as u128) << 2;
            assert_eq!(zeck_expand(total).bits(), bits);
        }
    }
    assert!(seen.iter().all(|&c| c == 1));
}

#[test]
fn digit_sum_is_minimal() {
    // fewest Fibonacci summands (repeats allowed), by dynamic programming
    let fibs: Vec<u64> = (2..=20).map(|k| fib_u64(k).unwrap()).collect();
    let mut best = vec![u32::MAX; 2001];
    best[0] = 0;
    for n in 1..=2000usize {
        for &f in fibs.iter().filter(|&&f| f as usize <= n) {
            best[n] = best[n].min(best[n - f as usize] + 1);
        }
        assert_eq!(best[n], sz(n as u64), "n={n}");
    }
}

#[test]
fn low_zero_gap_law() {
    for lambda in 3..=12usize {
        let w = w_seq(lambda, 10_000).unwrap();
        let (fl, fl1) = (fib_u64(lambda).unwrap(), fib_u64(lambda - 1).unwrap());
        for j in 0..w.len() - 1 {
            let gap = w[j + 1] - w[j];
            let want = if delta(j as u64, 2) == 1 { fl1 } else { fl };
            assert_eq!(gap, want, "lambda={lambda} j={j}");
        }
    }
}
