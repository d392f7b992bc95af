//! The 1-bit window comparator and the Bernoulli rates it induces.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_range, Result};
use crate::numerics::{q_function, Probability};

/// Window comparator with thresholds at `+-c * sigma0`.
///
/// `c` is dimensionless; `sigma0` is the standard deviation of each real
/// input sample under the null hypothesis. For complex baseband models the
/// caller passes the per-real-dimension deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparatorConfig {
    c: f64,
    sigma0: f64,
}

impl ComparatorConfig {
    pub fn new(c: f64, sigma0: f64) -> Result<Self> {
        check_range("c", c, c >= 0.0, "c >= 0")?;
        check_range("sigma0", sigma0, sigma0 > 0.0, "sigma0 > 0")?;
        Ok(Self { c, sigma0 })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// Upper window edge `w_U = c * sigma0`; the lower edge is its negative.
    pub fn level(&self) -> f64 {
        self.c * self.sigma0
    }

    pub fn upper(&self) -> f64 {
        self.level()
    }

    pub fn lower(&self) -> f64 {
        -self.level()
    }

    /// Comparator output without the finiteness check, for hot loops over
    /// generated samples.
    #[inline]
    pub fn bit(&self, sample: f64) -> bool {
        sample.abs() > self.level()
    }

    /// `true` iff `|sample| > c * sigma0`. The window edges themselves map to `false`.
    pub fn quantize(&self, sample: f64) -> Result<bool> {
        check_finite("sample", sample)?;
        Ok(self.bit(sample))
    }

    pub fn quantize_block(&self, samples: &[f64]) -> Result<Vec<bool>> {
        samples.iter().map(|&s| self.quantize(s)).collect()
    }

    pub fn null_success_rate(&self) -> Probability {
        // c was validated at construction.
        null_success_rate(self.c).expect("validated c")
    }
}

/// `sigma0 / sigma1`, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct VarianceRatio(f64);

impl VarianceRatio {
    pub fn new(alpha: f64) -> Result<Self> {
        check_range(
            "alpha",
            alpha,
            alpha > 0.0 && alpha <= 1.0,
            "0 < alpha <= 1",
        )
        .map(Self)
    }

    /// From the two standard deviations.
    pub fn from_sigmas(sigma0: f64, sigma1: f64) -> Result<Self> {
        check_range("sigma0", sigma0, sigma0 > 0.0, "sigma0 > 0")?;
        check_range("sigma1", sigma1, sigma1 >= sigma0, "sigma1 >= sigma0")?;
        Self::new(sigma0 / sigma1)
    }

    /// From the null variance and the variance increase under the alternative.
    pub fn from_variances(sigma0_sq: f64, delta_var: f64) -> Result<Self> {
        check_range("sigma0_sq", sigma0_sq, sigma0_sq > 0.0, "sigma0_sq > 0")?;
        check_range("delta_var", delta_var, delta_var >= 0.0, "delta_var >= 0")?;
        Self::new((1.0 + delta_var / sigma0_sq).sqrt().recip())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Probability the comparator fires under the null, `2 Q(c)`.
///
/// Independent of `sigma0`.
pub fn null_success_rate(c: f64) -> Result<Probability> {
    check_range("c", c, c >= 0.0, "c >= 0")?;
    Ok(Probability::clamped(2.0 * q_function(c)?))
}

/// Probability the comparator fires under the alternative, `2 Q(alpha c)`.
pub fn alt_success_rate(c: f64, ratio: VarianceRatio) -> Result<Probability> {
    null_success_rate(c * ratio.value())
}
