use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::SampleSource;
use crate::detector::Hypothesis;
use crate::error::{check_range, Error, Result};
use crate::numerics::Count;

/// `n` i.i.d. draws from `N(0, sigma0_sq)` under H0 and
/// `N(0, sigma0_sq + delta_var)` under H1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianScenario {
    pub sigma0_sq: f64,
    pub delta_var: f64,
    pub n: Count,
}

impl GaussianScenario {
    pub fn new(sigma0_sq: f64, delta_var: f64, n: Count) -> Result<Self> {
        let s = Self {
            sigma0_sq,
            delta_var,
            n,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_range(
            "sigma0_sq",
            self.sigma0_sq,
            self.sigma0_sq > 0.0,
            "sigma0_sq > 0",
        )?;
        check_range(
            "delta_var",
            self.delta_var,
            self.delta_var >= 0.0,
            "delta_var >= 0",
        )?;
        if self.n == 0 {
            return Err(Error::InvalidScenario("n must be at least 1".into()));
        }
        Ok(())
    }

    /// `sigma0 / sigma1 = 1 / sqrt(1 + delta_var / sigma0_sq)`.
    pub fn alpha(&self) -> f64 {
        (1.0 + self.delta_var / self.sigma0_sq).sqrt().recip()
    }
}

impl SampleSource for GaussianScenario {
    fn len(&self) -> Count {
        self.n
    }

    fn null_variance(&self) -> f64 {
        self.sigma0_sq
    }

    fn alt_variance(&self) -> f64 {
        self.sigma0_sq + self.delta_var
    }

    fn is_iid(&self) -> bool {
        true
    }

    fn fill<R: Rng + ?Sized>(&self, hypothesis: Hypothesis, rng: &mut R, out: &mut [f64]) {
        let sd = match hypothesis {
            Hypothesis::H0 => self.null_variance(),
            Hypothesis::H1 => self.alt_variance(),
        }
        .sqrt();
        for x in out.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *x = sd * z;
        }
    }
}
