//! Generative models and the Monte-Carlo harness.
//!
//! Every scenario produces a block of real samples that are zero-mean
//! Gaussian with a known per-sample variance under the null. Complex
//! baseband models are flattened into real and imaginary parts, so each
//! real sample carries half of the complex variance.

mod gaussian;
mod mimo;
mod monte_carlo;
mod wsn;

pub use gaussian::GaussianScenario;
pub use mimo::{JammerPilot, MimoScenario, UserLink};
pub use monte_carlo::{
    plan, run_monte_carlo, run_monte_carlo_multi, BaselineReport, DetectorSelection, Estimate,
    RunPlan, TrialReport,
};
pub use wsn::WsnScenario;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::detector::Hypothesis;
use crate::error::Result;
use crate::numerics::Count;
use crate::quantizer::VarianceRatio;

/// Linear power from decibels.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// A generator of length-`n` real sample blocks.
pub trait SampleSource {
    /// Number of real samples per block.
    fn len(&self) -> Count;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Variance of each real sample under H0.
    fn null_variance(&self) -> f64;

    /// Variance of each real sample under H1.
    fn alt_variance(&self) -> f64;

    /// Whether the samples of one block are independent under both
    /// hypotheses, so the binomial model is exact rather than approximate.
    fn is_iid(&self) -> bool;

    /// Overwrites `out` (length [`SampleSource::len`]) with one block.
    fn fill<R: Rng + ?Sized>(&self, hypothesis: Hypothesis, rng: &mut R, out: &mut [f64]);

    fn generate<R: Rng + ?Sized>(&self, hypothesis: Hypothesis, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.fill(hypothesis, rng, &mut out);
        out
    }

    fn variance_ratio(&self) -> Result<VarianceRatio> {
        VarianceRatio::from_sigmas(self.null_variance().sqrt(), self.alt_variance().sqrt())
    }
}

/// Any of the supported generative models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Gaussian(GaussianScenario),
    Mimo(MimoScenario),
    Wsn(WsnScenario),
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::Gaussian(s) => s.validate(),
            Scenario::Mimo(s) => s.validate(),
            Scenario::Wsn(s) => s.validate(),
        }
    }
}

impl From<GaussianScenario> for Scenario {
    fn from(s: GaussianScenario) -> Self {
        Scenario::Gaussian(s)
    }
}

impl From<MimoScenario> for Scenario {
    fn from(s: MimoScenario) -> Self {
        Scenario::Mimo(s)
    }
}

impl From<WsnScenario> for Scenario {
    fn from(s: WsnScenario) -> Self {
        Scenario::Wsn(s)
    }
}

impl SampleSource for Scenario {
    fn len(&self) -> Count {
        match self {
            Scenario::Gaussian(s) => s.len(),
            Scenario::Mimo(s) => s.len(),
            Scenario::Wsn(s) => s.len(),
        }
    }

    fn null_variance(&self) -> f64 {
        match self {
            Scenario::Gaussian(s) => s.null_variance(),
            Scenario::Mimo(s) => s.null_variance(),
            Scenario::Wsn(s) => s.null_variance(),
        }
    }

    fn alt_variance(&self) -> f64 {
        match self {
            Scenario::Gaussian(s) => s.alt_variance(),
            Scenario::Mimo(s) => s.alt_variance(),
            Scenario::Wsn(s) => s.alt_variance(),
        }
    }

    fn is_iid(&self) -> bool {
        match self {
            Scenario::Gaussian(s) => s.is_iid(),
            Scenario::Mimo(s) => s.is_iid(),
            Scenario::Wsn(s) => s.is_iid(),
        }
    }

    fn fill<R: Rng + ?Sized>(&self, hypothesis: Hypothesis, rng: &mut R, out: &mut [f64]) {
        match self {
            Scenario::Gaussian(s) => s.fill(hypothesis, rng, out),
            Scenario::Mimo(s) => s.fill(hypothesis, rng, out),
            Scenario::Wsn(s) => s.fill(hypothesis, rng, out),
        }
    }
}

/// Circularly-symmetric complex normal with variance `variance`.
pub(crate) fn complex_normal<R: Rng + ?Sized>(
    rng: &mut R,
    variance: f64,
) -> num_complex::Complex64 {
    use rand_distr::{Distribution, StandardNormal};
    let scale = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    num_complex::Complex64::new(re * scale, im * scale)
}
