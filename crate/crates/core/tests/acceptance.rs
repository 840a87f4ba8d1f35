//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line;
//! the process exits non-zero when any criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zecklab::config::Config;
use zecklab::detection::{detect_lowdigits, detect_via_b, tiling_error_fit, tiling_error_rate, LowDigitDetector};
use zecklab::golden::{GoldenInt, GoldenRational, PHI};
use zecklab::harmonic::discrepancy::{bounded_quotient_bound, discrepancy_nalpha};
use zecklab::harmonic::fourier::{
    correlation_identity_check, fourier_decay_fit, fourier_gtilde_direct, fourier_gtilde_matrix,
};
use zecklab::harmonic::gowers::{u2_decay, u3_decay};
use zecklab::harmonic::inequalities::{vdc_check, vdc_general_check};
use zecklab::harmonic::vaaler::vaaler;
use zecklab::markov::{empirical_joint_integers, window_histogram_integers, MarkovDigitModel};
use zecklab::numeration::{carry_mismatch_count, fib_u64, w_seq};
use zecklab::primes::experiments::{
    deviation_from_counts, exp_sum_sz_mangoldt, fibonacci_prime_scan, local_clt_from_histogram,
    residue_counts_from_histogram, smallest_prime_with_sz, sz_histogram_primes,
};
use zecklab::{sz, v, zeck_expand};

type Outcome = (bool, String);

fn trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn c1_zeckendorf() -> Outcome {
    // admissible subsets of {F_2, …, F_21}
    let mut reps = vec![0u32; 10_001];
    let mut greedy_ok = true;
    for mask in 0u32..(1 << 20) {
        if mask & (mask >> 1) != 0 {
            continue;
        }
        let total: u64 = (0..20).filter(|i| mask >> i & 1 == 1).map(|i| fib_u64(i + 2).unwrap()).sum();
        if total <= 10_000 {
            reps[total as usize] += 1;
            greedy_ok &= zeck_expand(total).bits() == (mask as u128) << 2;
        }
    }
    let unique = reps.iter().all(|&c| c == 1);
    let mut best = vec![u32::MAX; 2001];
    best[0] = 0;
    let mut minimal = true;
    for n in 1..=2000usize {
        for k in 2..=17 {
            let f = fib_u64(k).unwrap() as usize;
            if f <= n {
                best[n] = best[n].min(best[n - f] + 1);
            }
        }
        minimal &= best[n] == sz(n as u64);
    }
    (greedy_ok && unique && minimal, format!("unique={unique} greedy={greedy_ok} minimal={minimal}"))
}

fn c2_detection() -> Outcome {
    use rayon::prelude::*;
    let mut mismatches = 0usize;
    for lambda in 2..=15usize {
        let det = LowDigitDetector::new(lambda).unwrap();
        mismatches += (0..100_000u64)
            .into_par_iter()
            .filter(|&n| {
                let want = v(n, lambda);
                det.detect(n).ok() != Some(want)
                    || detect_via_b(n, lambda).ok() != Some(want)
                    || (n % 997 == 0 && detect_lowdigits(n, lambda).ok() != Some(want))
            })
            .count();
    }
    (mismatches == 0, format!("mismatches={mismatches} over n<1e5, 2≤λ≤15"))
}

fn c3_tiling() -> Outcome {
    let fit = tiling_error_fit(6..=18, 100_000).unwrap();
    let worst = fit
        .rates
        .iter()
        .map(|&(k, r)| r / (8.0 * PHI.powi(-(k as i32))))
        .fold(0.0, f64::max);
    let target = -PHI.ln();
    let slope_ok = (fit.slope - target).abs() <= 0.15 * target.abs();
    (
        worst <= 1.0 && slope_ok,
        format!("max rate/(8φ^-k)={worst:.3} slope={:.4} target={target:.4}±15%", fit.slope),
    )
}

/// `E v^{S_n}`, `E S_n`, `E S_n²` over all `2^n` chain paths.
fn path_moments(n: u32, v: Complex64) -> (Complex64, GoldenRational, GoldenRational) {
    let model = MarkovDigitModel::new();
    let pi = model.stationary();
    let p = model.transition();
    let pf = |g: &GoldenInt| g.to_f64();
    let mut pgf = Complex64::new(0.0, 0.0);
    let mut m1 = GoldenRational::zero();
    let mut m2 = GoldenRational::zero();
    for path in 0u32..(1 << n) {
        let bit = |i: u32| (path >> i & 1) as usize;
        let mut prob = pi[bit(0)].clone();
        let mut pr = pi[bit(0)].to_f64();
        for i in 1..n {
            let step = &p[bit(i - 1)][bit(i)];
            prob = prob.mul(&GoldenRational::from_golden(step.clone()));
            pr *= pf(step);
        }
        if prob.is_zero() {
            continue;
        }
        let s = path.count_ones();
        pgf += pr * v.powu(s);
        let sr = GoldenRational::from_ratio(s as i64, 1).unwrap();
        m1 = m1.add(&prob.mul(&sr));
        m2 = m2.add(&prob.mul(&sr).mul(&sr));
    }
    (pgf, m1, m2)
}

fn c4_markov() -> Outcome {
    let model = MarkovDigitModel::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for n in 1..=12u32 {
        for _ in 0..8 {
            let v = Complex64::from_polar(rng.gen_range(0.0..1.5), rng.gen_range(-3.2..3.2));
            let (dp, _, _) = path_moments(n, v);
            worst = worst.max((model.pgf(v, n).unwrap() - dp).norm());
        }
        let (_, m1, m2) = path_moments(n, Complex64::new(1.0, 0.0));
        let (mean, var) = model.mean_var(n);
        exact &= mean.sub(&m1).is_zero() && var.sub(&m2.sub(&m1.mul(&m1))).is_zero();
    }
    let var1 = model.mean_var(1).1.sub(&GoldenRational::from_ratio(1, 5).unwrap()).is_zero();
    (
        worst <= 1e-12 && exact && var1,
        format!("max|pgf-DP|={worst:.2e} closed-form moments exact={exact} Var S1=1/5 {var1}"),
    )
}

fn c5_digit_stats(cfg: &Config) -> Outcome {
    let x = 10_000_000u64;
    let (lo, hi) = (15usize, 20usize);
    let model = MarkovDigitModel::new();
    let hist = window_histogram_integers(x, lo, hi).unwrap();
    let freq = |pos: &[usize], val: &[u8]| -> f64 {
        let hits: u64 = hist
            .iter()
            .enumerate()
            .filter(|(w, _)| pos.iter().zip(val).all(|(&k, &b)| (w >> (k - lo) & 1) as u8 == b))
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / x as f64
    };
    let mut worst: f64 = 0.0;
    let mut adjacent_zero = true;
    for k in lo..=hi {
        for b in 0..=1u8 {
            let want = model.joint_prob(&[k as u64], &[b]).unwrap().to_f64();
            worst = worst.max((freq(&[k], &[b]) - want).abs());
        }
        for k2 in k + 1..=hi {
            for (b1, b2) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                let got = freq(&[k, k2], &[b1, b2]);
                let want = model.joint_prob(&[k as u64, k2 as u64], &[b1, b2]).unwrap().to_f64();
                worst = worst.max((got - want).abs());
                if k2 == k + 1 && (b1, b2) == (1, 1) {
                    adjacent_zero &= got == 0.0;
                }
            }
        }
    }
    // the scan through the window histogram agrees with the direct frequency
    let direct = empirical_joint_integers(x, &[17, 19], &[1, 0]).unwrap();
    let consistent = direct == freq(&[17, 19], &[1, 0]);
    (
        worst <= cfg.digit_stat_tol && adjacent_zero && consistent,
        format!("max|emp-joint|={worst:.2e} tol={} adjacent(1,1)=0 {adjacent_zero}", cfg.digit_stat_tol),
    )
}

fn c6_fourier(cfg: &Config) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta: f64 = rng.gen();
        let beta: f64 = rng.gen();
        for lambda in 2..=25usize {
            let d = fourier_gtilde_direct(lambda, theta, beta).unwrap();
            worst = worst.max((fourier_gtilde_matrix(lambda, theta, beta) - d).norm());
        }
    }
    let fit = fourier_decay_fit(0.5, 5..=25, 256).unwrap();
    (
        worst <= 1e-9 && fit.rate_per_lambda >= cfg.fourier_rate_min,
        format!(
            "max|matrix-direct|={worst:.2e} decay rate={:.4} per λ (min {})",
            fit.rate_per_lambda, cfg.fourier_rate_min
        ),
    )
}

fn c7_correlation(cfg: &Config) -> Outcome {
    let mut worst: f64 = 0.0;
    for lambda in [10usize, 12, 14] {
        let f = fib_u64(lambda).unwrap();
        let w = w_seq(lambda, 40).unwrap();
        let blocks: Vec<usize> = (0..w.len() - 1).filter(|&i| w[i + 1] - w[i] == f).take(3).collect();
        for theta in [0.5, 0.3, 2f64.sqrt() - 1.0] {
            for t in [1u64, 2, 3, 5] {
                for &i in &blocks {
                    let r = correlation_identity_check(lambda, t, theta, i).unwrap();
                    worst = worst.max(r * f as f64 / t as f64);
                }
            }
        }
    }
    (worst <= cfg.correlation_k, format!("max residual·F/t={worst:.3e} (bound {})", cfg.correlation_k))
}

fn c8_carry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=100_000u64);
        let r = rng.gen_range(1..=20u64);
        let lambda = rng.gen_range(8..=24usize);
        let count = carry_mismatch_count(n, r, lambda);
        let bound = n as f64 * r as f64 / fib_u64(lambda - 1).unwrap() as f64;
        worst = worst.max(count as f64 / bound);
    }
    (worst <= 1.0, format!("max count/(N r/F_(λ-1))={worst:.4}"))
}

fn c9_gowers() -> Outcome {
    let u2 = u2_decay(0.5, 4..=14).unwrap();
    let u2_ok = u2.windows(2).all(|w| w[1].1 < w[0].1);
    let u3 = u3_decay(0.5, 4..=12, 256, 9).unwrap();
    let comb = |a: &(usize, f64, f64), b: &(usize, f64, f64)| (a.2 * a.2 + b.2 * b.2).sqrt();
    let (first, last) = (&u3[0], &u3[u3.len() - 1]);
    let overall = first.1 - last.1 > 3.0 * comb(first, last);
    let no_rise = u3.windows(2).all(|w| w[1].1 - w[0].1 <= 3.0 * comb(&w[0], &w[1]));
    let pts: Vec<(f64, f64)> = u3.iter().map(|r| (r.0 as f64, r.1.ln())).collect();
    let slope = slope(&pts);
    let u2s: Vec<String> = u2.iter().map(|r| format!("{:.4}", r.1)).collect();
    let u3s: Vec<String> = u3.iter().map(|r| format!("{:.4}±{:.4}", r.1, r.2)).collect();
    (
        u2_ok && overall && no_rise && slope < 0.0,
        format!(
            "U2 strictly decreasing={u2_ok} [{}]; U3 drop>3se={overall} no rise>3se={no_rise} log-slope={slope:.4} [{}]",
            u2s.join(" "),
            u3s.join(" ")
        ),
    )
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn c10_discrepancy() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let nd = n as f64 * discrepancy_nalpha(n).unwrap();
        let bound = bounded_quotient_bound(n, 1);
        ok &= nd <= bound;
        parts.push(format!("N={n}: {nd:.3}≤{bound:.3}"));
    }
    (ok, parts.join(" "))
}

fn c11_vaaler() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut envelope = 0.0f64;
    let mut coeffs = true;
    for _ in 0..20 {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b = a + rng.gen_range(0.001..0.999);
        let len = b - a;
        let h = rng.gen_range(1..=64usize);
        let (pa, pb) = vaaler(a, b, h).unwrap();
        for j in 0..10_000 {
            let x = j as f64 / 10_000.0;
            let t = (x - a) - (x - a).floor();
            let chi = if t <= len { 1.0 } else { 0.0 };
            envelope = envelope.max((chi - pa.eval(x)).abs() - pb.eval(x));
        }
        // rounding slack of a few ulps on quantities of size ≤ 1
        let ulp = 4.0 * f64::EPSILON;
        coeffs &= pa.coeff(0) == Complex64::new(len, 0.0);
        for k in 1..=h as i64 {
            for s in [k, -k] {
                coeffs &= pa.coeff(s).norm() <= len.min(1.0 / (std::f64::consts::PI * k as f64)) + ulp;
                coeffs &= pb.coeff(s).norm() <= 1.0 / (h + 1) as f64 + ulp;
            }
        }
    }
    (
        envelope <= 1e-9 && coeffs,
        format!("max(|χ-A|-B)={envelope:.2e} coefficient bounds={coeffs}"),
    )
}

fn c12_vdc() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=64usize);
        let z: Vec<Complex64> =
            (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let r = rng.gen_range(1..=8usize);
        let (lhs, rhs) = vdc_check(&z, r).unwrap();
        worst = worst.max(lhs - rhs * (1.0 + 1e-12) - 1e-12);
        let k: Vec<u64> = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(0..16u64)).collect();
        let (lhs, rhs) = vdc_general_check(&z, &k).unwrap();
        worst = worst.max(lhs - rhs * (1.0 + 1e-12) - 1e-12);
    }
    (worst <= 0.0, format!("max(lhs-rhs)={worst:.2e} over 1000 sequences"))
}

fn c13_local_clt(cfg: &Config, hist: &[u64]) -> Outcome {
    let t = local_clt_from_histogram(100_000_000, hist);
    (
        t.sup_rel_err <= cfg.local_clt_sup_tol && t.modal_rel_err <= cfg.local_clt_modal_tol,
        format!(
            "sup/π(x)={:.4} (tol {}) modal k={} rel err={:.4} (tol {})",
            t.sup_rel_err, cfg.local_clt_sup_tol, t.modal_k, t.modal_rel_err, cfg.local_clt_modal_tol
        ),
    )
}

fn c14_residues(cfg: &Config, hist8: &[u64]) -> Outcome {
    let hist6 = sz_histogram_primes(1_000_000).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for m in 2..=5u32 {
        let d = deviation_from_counts(&residue_counts_from_histogram(hist8, m).unwrap());
        ok &= d <= cfg.residue_tol;
        parts.push(format!("m={m}: {d:.5}"));
    }
    let d8 = deviation_from_counts(&residue_counts_from_histogram(hist8, 2).unwrap());
    let d6 = deviation_from_counts(&residue_counts_from_histogram(&hist6, 2).unwrap());
    ok &= d8 < d6;
    (ok, format!("x=1e8 {} (tol {}); m=2 at 1e6: {d6:.5}", parts.join(" "), cfg.residue_tol))
}

fn c15_small_sz() -> Outcome {
    let mut ok = true;
    let mut found = Vec::new();
    for k in 1..=15u32 {
        match smallest_prime_with_sz(k, 2 * k as usize + 10).unwrap() {
            Some(p) => {
                ok &= trial_division(p) && sz(p) == k;
                // nothing smaller with the same digit sum is prime
                ok &= (2..p).filter(|&q| sz(q) == k).all(|q| !trial_division(q));
                found.push(p);
            }
            None => ok = false,
        }
    }
    ok &= found.first() == Some(&2) && found.get(1) == Some(&7);
    (ok, format!("{found:?}"))
}

fn c16_fib_primes() -> Outcome {
    let want = [3usize, 4, 5, 7, 11, 13, 17, 23, 29, 43, 47, 83, 131, 137, 359, 431, 433, 449];
    let got: Vec<usize> = fibonacci_prime_scan(450).unwrap().into_iter().map(|f| f.index).collect();
    (got == want, format!("{got:?}"))
}

fn c17_determinism() -> Outcome {
    let run = || -> Vec<u64> {
        let mut bits = Vec::new();
        bits.extend(sz_histogram_primes(2_000_000).unwrap());
        let s = exp_sum_sz_mangoldt(0.37, 1_000_000).unwrap();
        bits.extend([s.re.to_bits(), s.im.to_bits()]);
        bits.extend(u3_decay(0.5, 5..=6, 32, 17).unwrap().iter().flat_map(|r| [r.1.to_bits(), r.2.to_bits()]));
        let fit = fourier_decay_fit(0.5, 5..=12, 64).unwrap();
        bits.push(fit.rate_per_lambda.to_bits());
        bits.push(tiling_error_rate(9, 20_000).unwrap().to_bits());
        bits.push(discrepancy_nalpha(50_000).unwrap().to_bits());
        bits.extend(MarkovDigitModel::new().sample_path(1000, 3).into_iter().map(u64::from));
        bits
    };
    let outputs: Vec<Vec<u64>> = [1usize, 2, 7]
        .iter()
        .map(|&threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(run))
        .collect();
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    (same, format!("thread counts 1, 2, 7 bit-identical={same}"))
}

fn main() {
    let cfg = Config::resolve(None).expect("configuration");
    let mut failed = Vec::new();
    let mut record = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let (ok, detail) = f();
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id:>2} {name}: {detail} [{:.1}s]", start.elapsed().as_secs_f64());
        if !ok {
            failed.push(id);
        }
    };
    record(1, "zeckendorf oracle", &mut c1_zeckendorf);
    record(2, "detection equivalence", &mut c2_detection);
    record(3, "tiling error decay", &mut c3_tiling);
    record(4, "markov exactness", &mut c4_markov);
    record(5, "digit statistics", &mut || c5_digit_stats(&cfg));
    record(6, "fourier recursion", &mut || c6_fourier(&cfg));
    record(7, "correlation identity", &mut || c7_correlation(&cfg));
    record(8, "carry bound", &mut c8_carry);
    record(9, "gowers decay", &mut c9_gowers);
    record(10, "nφ discrepancy", &mut c10_discrepancy);
    record(11, "vaaler envelope", &mut c11_vaaler);
    record(12, "van der corput", &mut c12_vdc);
    let hist8 = sz_histogram_primes(100_000_000).expect("sieve to 1e8");
    record(13, "local clt", &mut || c13_local_clt(&cfg, &hist8));
    record(14, "residue classes", &mut || c14_residues(&cfg, &hist8));
    record(15, "small digit-sum primes", &mut c15_small_sz);
    record(16, "fibonacci primes", &mut c16_fib_primes);
    record(17, "determinism", &mut c17_determinism);
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
