use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{check_finite, check_range, Result};

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Upper tail of the standard normal, `Q(x) = 1 - Phi(x)`.
///
/// Evaluated as `erfc(x / sqrt 2) / 2` with the fdlibm `erfc` (max error
/// below 1 ulp on its rational pieces), so relative accuracy holds deep
/// into both tails.
pub fn q_function(x: f64) -> Result<f64> {
    check_finite("x", x)?;
    Ok(0.5 * libm::erfc(x * FRAC_1_SQRT_2))
}

// Acklam's rational approximation to the normal quantile; about 1e-9
// relative error before refinement.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

fn tail_quantile(q: f64) -> f64 {
    // q = sqrt(-2 ln p) for the lower tail.
    (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
        / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
}

/// Initial guess for `Phi^{-1}(p)`.
fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        tail_quantile((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail_quantile((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// Inverse of [`q_function`]: the `x` with `Q(x) = p`.
pub fn q_inverse(p: f64) -> Result<f64> {
    check_range("p", p, p > 0.0 && p < 1.0, "0 < p < 1")?;
    // Q^{-1}(p) = -Phi^{-1}(p); refine the seed with Newton steps on Q itself.
    let mut x = -acklam(p);
    for _ in 0..4 {
        let density = normal_pdf(x);
        if density == 0.0 {
            break;
        }
        let residual = 0.5 * libm::erfc(x * FRAC_1_SQRT_2) - p;
        let step = residual / density;
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson integral of the density over [x, x + 40]; the
    /// tail beyond is below 1e-300 for every x used here.
    fn q_by_quadrature(x: f64) -> f64 {
        let upper = x.max(0.0) + 40.0;
        let steps = 400_000;
        let h = (upper - x) / steps as f64;
        let mut sum = normal_pdf(x) + normal_pdf(upper);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * normal_pdf(x + i as f64 * h);
        }
        sum * h / 3.0
    }

    /// Bisection on q_function, independent of the Acklam seed.
    fn q_inverse_by_bisection(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if q_function(mid).unwrap() > p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn q_at_zero_is_half() {
        assert_eq!(q_function(0.0).unwrap(), 0.5);
    }

    #[test]
    fn q_at_window_width() {
        let q = q_function(1.6).unwrap();
        assert!((q - 0.054_799_291_699_557_97).abs() < 1e-15, "{q}");
        assert!((2.0 * q - 0.11).abs() < 0.001);
    }

    #[test]
    fn q_matches_quadrature_to_relative_1e12() {
        let mut x = -8.0;
        while x <= 8.0 {
            let exact = q_by_quadrature(x);
            let got = q_function(x).unwrap();
            let rel = ((got - exact) / exact).abs();
            assert!(rel < 1e-12, "x={x} got={got} exact={exact} rel={rel}");
            x += 0.25;
        }
    }

    #[test]
    fn q_reflection_and_monotone() {
        let mut prev = f64::INFINITY;
        let mut x = -8.0;
        while x <= 8.0 {
            let q = q_function(x).unwrap();
            let qm = q_function(-x).unwrap();
            assert!((q + qm - 1.0).abs() < 1e-15);
            // Near x = -8 the values are 1 - O(1e-16) and only weakly ordered.
            if x > -5.0 {
                assert!(q < prev, "x={x}");
            } else {
                assert!(q <= prev, "x={x}");
            }
            prev = q;
            x += 0.01;
        }
    }

    #[test]
    fn q_rejects_non_finite() {
        assert!(q_function(f64::NAN).is_err());
        assert!(q_function(f64::INFINITY).is_err());
    }

    #[test]
    fn q_inverse_examples() {
        assert_eq!(q_inverse(0.5).unwrap(), 0.0);
        let back = q_inverse(q_function(1.6).unwrap()).unwrap();
        assert!((back - 1.6).abs() < 1e-9);
        // 0.05 -> 1.6448..., frozen from bisection on q_function.
        let oracle = q_inverse_by_bisection(0.05);
        assert!((oracle - 1.644_853_626_951_472_2).abs() < 1e-12);
        assert!((q_inverse(0.05).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn q_inverse_round_trips() {
        for &p in &[
            1e-300,
            1e-20,
            1e-8,
            0.001,
            0.02,
            0.1,
            0.3,
            0.5,
            0.7,
            0.97,
            0.999_999,
            1.0 - 1e-12,
        ] {
            let x = q_inverse(p).unwrap();
            let back = q_function(x).unwrap();
            assert!((back - p).abs() <= 1e-10, "p={p} x={x} back={back}");
            if p < 0.5 {
                assert!(((back - p) / p).abs() <= 1e-10, "p={p} x={x} back={back}");
            }
        }
    }

    #[test]
    fn q_inverse_rejects_endpoints() {
        assert!(q_inverse(0.0).is_err());
        assert!(q_inverse(1.0).is_err());
    }
}
