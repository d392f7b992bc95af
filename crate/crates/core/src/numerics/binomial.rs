use super::{smallest_count, Count};
use crate::error::{check_range, Error, Result};

/// Terms smaller than this fraction of the running sum are dropped once the
/// summation has moved past the largest term.
const TAIL_CUTOFF: f64 = 1e-18;

fn check_theta(theta: f64) -> Result<f64> {
    check_range(
        "theta",
        theta,
        (0.0..=1.0).contains(&theta),
        "0 <= theta <= 1",
    )
}

fn check_k(k: Count, n: Count) -> Result<()> {
    if k > n {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            expected: "k <= n",
        });
    }
    Ok(())
}

/// `ln(k!) - ln(sqrt(2 pi k) (k/e)^k)`, the Stirling remainder.
fn stirling_error(k: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if k <= 15.0 {
        let ln_sqrt_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
        return libm::lgamma(k + 1.0) - (k + 0.5) * k.ln() + k - ln_sqrt_2pi;
    }
    let kk = k * k;
    if k > 500.0 {
        (S0 - S1 / kk) / k
    } else if k > 80.0 {
        (S0 - (S1 - S2 / kk) / kk) / k
    } else if k > 35.0 {
        (S0 - (S1 - (S2 - S3 / kk) / kk) / kk) / k
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / kk) / kk) / kk) / kk) / k
    }
}

/// Deviance term `x ln(x / mean) + mean - x`, summed as a series near `x = mean`.
fn deviance(x: f64, mean: f64) -> f64 {
    if (x - mean).abs() < 0.1 * (x + mean) {
        let v = (x - mean) / (x + mean);
        let mut sum = (x - mean) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let next = sum + ej / (2 * j + 1) as f64;
            if next == sum {
                return sum;
            }
            sum = next;
        }
        sum
    } else {
        x * (x / mean).ln() + mean - x
    }
}

/// Natural log of the binomial pmf; `-inf` for impossible outcomes.
///
/// Inputs are assumed validated.
fn ln_pmf_unchecked(k: Count, n: Count, theta: f64) -> f64 {
    if theta == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if theta == 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    // Saddle-point form, accurate to a few ulps in relative terms for any n.
    let nf = n as f64;
    if k == 0 {
        return nf * (-theta).ln_1p();
    }
    if k == n {
        return nf * theta.ln();
    }
    let kf = k as f64;
    let rest = nf - kf;
    stirling_error(nf)
        - stirling_error(kf)
        - stirling_error(rest)
        - deviance(kf, nf * theta)
        - deviance(rest, nf * (1.0 - theta))
        - 0.5 * (2.0 * std::f64::consts::PI * kf * rest / nf).ln()
}

pub fn binomial_ln_pmf(k: Count, n: Count, theta: f64) -> Result<f64> {
    check_k(k, n)?;
    check_theta(theta)?;
    Ok(ln_pmf_unchecked(k, n, theta))
}

/// `P(S = k)` for `S ~ Bin(n, theta)`.
pub fn binomial_pmf(k: Count, n: Count, theta: f64) -> Result<f64> {
    binomial_ln_pmf(k, n, theta).map(f64::exp)
}

/// Sums pmf terms over `ks`, which must move away from the mode so that the
/// terms decrease monotonically.
fn sum_decreasing(n: Count, theta: f64, ks: impl Iterator<Item = Count>) -> f64 {
    let mut ks = ks.peekable();
    let Some(&first) = ks.peek() else {
        return 0.0;
    };
    let anchor = ln_pmf_unchecked(first, n, theta);
    if anchor == f64::NEG_INFINITY {
        return 0.0;
    }
    let mut scaled = 0.0;
    for k in ks {
        let term = (ln_pmf_unchecked(k, n, theta) - anchor).exp();
        scaled += term;
        if term < scaled * TAIL_CUTOFF {
            break;
        }
    }
    anchor.exp() * scaled
}

/// `(P(S <= k), P(S > k))` for `S ~ Bin(n, theta)`.
///
/// Only the tail on the far side of the mode is summed; the other is its
/// complement. This keeps small tail probabilities accurate to full
/// relative precision.
pub fn binomial_tails(k: Count, n: Count, theta: f64) -> Result<(f64, f64)> {
    check_k(k, n)?;
    check_theta(theta)?;
    if k == n {
        return Ok((1.0, 0.0));
    }
    if theta == 0.0 {
        return Ok((1.0, 0.0));
    }
    if theta == 1.0 {
        return Ok((0.0, 1.0));
    }
    let mode = ((n + 1) as f64 * theta).floor() as Count;
    if k < mode {
        let lower = sum_decreasing(n, theta, (0..=k).rev()).min(1.0);
        Ok((lower, 1.0 - lower))
    } else {
        let upper = sum_decreasing(n, theta, k + 1..=n).min(1.0);
        Ok((1.0 - upper, upper))
    }
}

/// `P(S <= k)`.
pub fn binomial_cdf(k: Count, n: Count, theta: f64) -> Result<f64> {
    binomial_tails(k, n, theta).map(|(lower, _)| lower)
}

/// `P(S > k)`.
pub fn binomial_sf(k: Count, n: Count, theta: f64) -> Result<f64> {
    binomial_tails(k, n, theta).map(|(_, upper)| upper)
}

fn gaussian_seed(n: Count, theta: f64, z: f64) -> Count {
    let mean = n as f64 * theta;
    let sd = (mean * (1.0 - theta)).sqrt();
    (mean + z * sd).floor().clamp(0.0, n as f64) as Count
}

/// Smallest `k` with `P(S <= k) >= p`.
pub fn binomial_inverse_cdf(p: f64, n: Count, theta: f64) -> Result<Count> {
    check_range("p", p, p > 0.0 && p < 1.0, "0 < p < 1")?;
    check_theta(theta)?;
    let z = super::q_inverse(1.0 - p).unwrap_or(0.0);
    let seed = gaussian_seed(n, theta, z);
    Ok(smallest_count(n, seed, |k| {
        binomial_tails(k, n, theta)
            .map(|(lower, _)| lower >= p)
            .unwrap_or(true)
    }))
}

/// Smallest `k` with `P(S > k) <= tail`.
///
/// Same threshold as `binomial_inverse_cdf(1 - tail, ..)` but compares the
/// directly summed upper tail, so no precision is lost forming `1 - tail`.
pub fn binomial_upper_quantile(tail: f64, n: Count, theta: f64) -> Result<Count> {
    check_range("tail", tail, tail > 0.0 && tail < 1.0, "0 < tail < 1")?;
    check_theta(theta)?;
    let z = super::q_inverse(tail)?;
    let seed = gaussian_seed(n, theta, z);
    Ok(smallest_count(n, seed, |k| {
        binomial_tails(k, n, theta)
            .map(|(_, upper)| upper <= tail)
            .unwrap_or(true)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q_function;
    use proptest::prelude::*;

    fn theta_c16() -> f64 {
        2.0 * q_function(1.6).unwrap()
    }

    /// Naive product-form pmf: C(n,k) built multiplicatively.
    fn naive_pmf(k: usize, n: usize, theta: f64) -> f64 {
        let mut choose = 1.0_f64;
        for i in 0..k {
            choose = choose * (n - i) as f64 / (i + 1) as f64;
        }
        choose * theta.powi(k as i32) * (1.0 - theta).powi((n - k) as i32)
    }

    #[test]
    fn degenerate_theta() {
        assert_eq!(binomial_pmf(0, 17, 0.0).unwrap(), 1.0);
        assert_eq!(binomial_pmf(3, 17, 0.0).unwrap(), 0.0);
        assert_eq!(binomial_pmf(17, 17, 1.0).unwrap(), 1.0);
        assert_eq!(binomial_cdf(0, 17, 0.0).unwrap(), 1.0);
        assert_eq!(binomial_cdf(16, 17, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn fair_coin_matches_enumeration() {
        // Count ones over all 2^10 sequences.
        let n = 10;
        let mut counts = [0u32; 11];
        for seq in 0u32..1 << n {
            counts[seq.count_ones() as usize] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            let expected = c as f64 / 1024.0;
            let got = binomial_pmf(k, n, 0.5).unwrap();
            assert!((got - expected).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn pmf_normalizes() {
        let theta = theta_c16();
        let total: f64 = (0..=320)
            .map(|k| binomial_pmf(k, 320, theta).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let total: f64 = (0..=10_000)
            .map(|k| binomial_pmf(k, 10_000, 0.37).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_pmf_matches_product_form() {
        for n in 0..=30 {
            for &theta in &[0.01, 0.1096, 0.3, 0.5, 0.77, 0.99] {
                for k in 0..=n {
                    let naive = naive_pmf(k, n, theta);
                    let got = binomial_pmf(k, n, theta).unwrap();
                    assert!(
                        ((got - naive) / naive).abs() < 1e-12,
                        "n={n} k={k} theta={theta}"
                    );
                }
            }
        }
    }

    #[test]
    fn cdf_matches_naive_summation() {
        let n = 50;
        for &theta in &[0.05, theta_c16(), 0.5, 0.9] {
            let mut running = 0.0;
            for k in 0..=n {
                running += naive_pmf(k, n, theta);
                let got = binomial_cdf(k, n, theta).unwrap();
                assert!((got - running).abs() < 1e-13, "k={k} theta={theta}");
            }
        }
    }

    #[test]
    fn cdf_at_reference_threshold() {
        let theta = theta_c16();
        assert!(binomial_cdf(44, 320, theta).unwrap() >= 0.95);
        assert!(binomial_cdf(43, 320, theta).unwrap() < 0.95);
        assert_eq!(binomial_cdf(320, 320, theta).unwrap(), 1.0);
    }

    #[test]
    fn inverse_cdf_reference_rows() {
        let theta = theta_c16();
        assert_eq!(binomial_inverse_cdf(0.95, 320, theta).unwrap(), 44);
        assert_eq!(binomial_inverse_cdf(0.95, 1280, theta).unwrap(), 159);
        assert_eq!(binomial_inverse_cdf(0.95, 2560, theta).unwrap(), 307);
        assert_eq!(binomial_upper_quantile(0.05, 2560, theta).unwrap(), 307);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(binomial_pmf(11, 10, 0.5).is_err());
        assert!(binomial_cdf(11, 10, 0.5).is_err());
        assert!(binomial_pmf(1, 10, 1.5).is_err());
        assert!(binomial_inverse_cdf(0.0, 10, 0.5).is_err());
        assert!(binomial_inverse_cdf(1.0, 10, 0.5).is_err());
    }

    #[test]
    fn large_n_tail_is_stable() {
        // Far tails at n = 1e5 stay positive and under the Chernoff bound
        // exp(-n KL(k/n || theta)).
        let kl = |q: f64, p: f64| q * (q / p).ln() + (1.0 - q) * ((1.0 - q) / (1.0 - p)).ln();
        let sf = binomial_sf(11_500, 100_000, 0.1).unwrap();
        assert!(
            sf > 0.0 && sf <= (-100_000.0 * kl(0.115, 0.1)).exp(),
            "{sf}"
        );
        let cdf = binomial_cdf(9_000, 100_000, 0.1).unwrap();
        assert!(
            cdf > 0.0 && cdf <= (-100_000.0 * kl(0.09, 0.1)).exp(),
            "{cdf}"
        );
    }

    proptest! {
        #[test]
        fn inverse_cdf_defining_property(n in 1usize..3000, theta in 0.001f64..0.999, p in 0.001f64..0.999) {
            let k = binomial_inverse_cdf(p, n, theta).unwrap();
            prop_assert!(binomial_cdf(k, n, theta).unwrap() >= p);
            if k > 0 {
                prop_assert!(binomial_cdf(k - 1, n, theta).unwrap() < p);
            }
        }

        #[test]
        fn upper_quantile_agrees_with_inverse_cdf(n in 1usize..3000, c in 0.5f64..3.0, pf in 0.001f64..0.5) {
            let theta = 2.0 * q_function(c).unwrap();
            let a = binomial_upper_quantile(pf, n, theta).unwrap();
            let b = binomial_inverse_cdf(1.0 - pf, n, theta).unwrap();
            // Rounding 1 - pf can move the boundary by at most one count.
            prop_assert!(a.abs_diff(b) <= 1);
        }

        #[test]
        fn cdf_monotone_and_tails_sum_to_one(n in 1usize..500, theta in 0.0f64..=1.0) {
            let mut prev = 0.0;
            for k in 0..=n {
                let (lower, upper) = binomial_tails(k, n, theta).unwrap();
                prop_assert!(lower + 1e-12 >= prev);
                prop_assert!((lower + upper - 1.0).abs() < 1e-12);
                prev = lower;
            }
        }
    }
}
