use crate::error::{check_range, Error, Result};

const MAX_ITER: usize = 100_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    check_range("a", a, a > 0.0, "a > 0")?;
    check_range("x", x, x >= 0.0, "x >= 0")?;
    Ok(())
}

/// `ln(x^a e^-x / Gamma(a))`, the common prefactor of both expansions.
fn ln_prefactor(a: f64, x: f64) -> f64 {
    a * x.ln() - x - libm::lgamma(a)
}

/// Lower regularized gamma by its power series; converges fast for x < a + 1.
fn p_series(a: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum * ln_prefactor(a, x).exp());
        }
    }
    Err(Error::NoConvergence("incomplete gamma series"))
}

/// Upper regularized gamma by modified Lentz continued fraction; for x >= a + 1.
fn q_continued_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h * ln_prefactor(a, x).exp());
        }
    }
    Err(Error::NoConvergence("incomplete gamma continued fraction"))
}

/// `P(a, x)`, the regularized lower incomplete gamma function.
pub fn regularized_gamma_p(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        p_series(a, x)
    } else {
        q_continued_fraction(a, x).map(|q| 1.0 - q)
    }
}

/// `Q(a, x) = 1 - P(a, x)`, computed without cancellation in the upper tail.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        p_series(a, x).map(|p| 1.0 - p)
    } else {
        q_continued_fraction(a, x)
    }
}

fn check_dof(dof: usize) -> Result<f64> {
    check_range("dof", dof as f64, dof >= 1, "dof >= 1")
}

pub fn chi_square_cdf(x: f64, dof: usize) -> Result<f64> {
    let v = check_dof(dof)?;
    regularized_gamma_p(0.5 * v, 0.5 * x)
}

pub fn chi_square_sf(x: f64, dof: usize) -> Result<f64> {
    let v = check_dof(dof)?;
    regularized_gamma_q(0.5 * v, 0.5 * x)
}

/// Wilson-Hilferty cube approximation; only used to bracket the root.
fn wilson_hilferty(lower_tail: f64, v: f64) -> f64 {
    let z = super::q_inverse(1.0 - lower_tail).unwrap_or(0.0);
    let k = 2.0 / (9.0 * v);
    (v * (1.0 - k + z * k.sqrt()).powi(3)).max(f64::MIN_POSITIVE)
}

/// Bisection for the root of an increasing `f` on `(0, inf)`, bracketed from `seed`.
fn invert_increasing(seed: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let (mut lo, mut hi) = (0.0_f64, seed);
    if f(seed)? < 0.0 {
        lo = seed;
        hi = seed * 2.0;
        let mut grow = 0;
        while f(hi)? < 0.0 {
            lo = hi;
            hi *= 2.0;
            grow += 1;
            if grow > 2000 {
                return Err(Error::NoConvergence("chi-square quantile bracket"));
            }
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * hi || mid == lo || mid == hi {
            return Ok(mid);
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence("chi-square quantile bisection"))
}

/// The `x` with `P(chi2_dof <= x) = p`.
pub fn chi_square_inverse_cdf(p: f64, dof: usize) -> Result<f64> {
    check_range("p", p, p > 0.0 && p < 1.0, "0 < p < 1")?;
    let v = check_dof(dof)?;
    let seed = wilson_hilferty(p, v);
    if p <= 0.5 {
        invert_increasing(seed, |x| Ok(chi_square_cdf(x, dof)? - p))
    } else {
        let tail = 1.0 - p;
        invert_increasing(seed, |x| Ok(tail - chi_square_sf(x, dof)?))
    }
}

/// The `x` with `P(chi2_dof > x) = tail`.
pub fn chi_square_inverse_sf(tail: f64, dof: usize) -> Result<f64> {
    check_range("tail", tail, tail > 0.0 && tail < 1.0, "0 < tail < 1")?;
    let v = check_dof(dof)?;
    let seed = wilson_hilferty(1.0 - tail, v);
    if tail >= 0.5 {
        let p = 1.0 - tail;
        invert_increasing(seed, |x| Ok(chi_square_cdf(x, dof)? - p))
    } else {
        invert_increasing(seed, |x| Ok(tail - chi_square_sf(x, dof)?))
    }
}
