//! Unquantized energy detector used as the reference for quantization loss.
//!
//! Under the null, each real sample is `N(0, sigma0_sq / 2)`, so the summed
//! energy scaled by `2 / sigma0_sq` is chi-square with one degree of freedom
//! per real sample.

use serde::{Deserialize, Serialize};

use crate::detector::{Decision, Hypothesis};
use crate::error::{check_range, Error, Result};
use crate::numerics::{chi_square_inverse_sf, chi_square_sf, Count, Probability};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTestParams {
    dof: Count,
    threshold: f64,
    sigma0_sq: f64,
}

impl ChiSquareTestParams {
    pub fn new(p_f: f64, dof: Count, sigma0_sq: f64) -> Result<Self> {
        let threshold = unquantized_threshold(p_f, dof, sigma0_sq)?;
        Ok(Self {
            dof,
            threshold,
            sigma0_sq,
        })
    }

    pub fn dof(&self) -> Count {
        self.dof
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn sigma0_sq(&self) -> f64 {
        self.sigma0_sq
    }

    /// Decision from a precomputed energy `sum x_i^2`.
    pub fn decide_energy(&self, energy: f64) -> Decision {
        Decision::deterministic(if energy > self.threshold {
            Hypothesis::H1
        } else {
            Hypothesis::H0
        })
    }

    /// Closed-form rejection probability when the complex-model variance is
    /// `sigma_sq` (per real dimension `sigma_sq / 2`).
    pub fn rejection_probability(&self, sigma_sq: f64) -> Result<Probability> {
        check_range("sigma_sq", sigma_sq, sigma_sq > 0.0, "sigma_sq > 0")?;
        let scaled = 2.0 * self.threshold / sigma_sq;
        Ok(Probability::clamped(chi_square_sf(scaled, self.dof)?))
    }
}

/// Energy threshold `(sigma0_sq / 2) * F^{-1}_{chi2(dof)}(1 - p_f)`.
pub fn unquantized_threshold(p_f: f64, dof: Count, sigma0_sq: f64) -> Result<f64> {
    let p_f = Probability::open("p_f", p_f)?;
    check_range("sigma0_sq", sigma0_sq, sigma0_sq > 0.0, "sigma0_sq > 0")?;
    Ok(0.5 * sigma0_sq * chi_square_inverse_sf(p_f.value(), dof)?)
}

/// Declares H1 iff `sum x_i^2` exceeds the threshold.
pub fn unquantized_decide(samples: &[f64], params: &ChiSquareTestParams) -> Result<Decision> {
    if samples.len() != params.dof {
        return Err(Error::LengthMismatch {
            expected: params.dof,
            actual: samples.len(),
        });
    }
    let energy: f64 = samples.iter().map(|x| x * x).sum();
    Ok(params.decide_energy(energy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn reference_thresholds() {
        let t = unquantized_threshold(0.05, 320, 6.0).unwrap();
        assert!((t - 1088.2).abs() / 1088.2 < 1e-3, "{t}");
        let t = unquantized_threshold(0.05, 1280, 6.0).unwrap();
        assert!((t - 4093.0).abs() / 4093.0 < 1e-3, "{t}");
        let t = unquantized_threshold(0.05, 2560, 6.0).unwrap();
        assert!((t - 8036.5).abs() / 8036.5 < 1e-3, "{t}");
    }

    #[test]
    fn threshold_vanishes_as_pf_nears_one() {
        let t = unquantized_threshold(0.999_999, 2, 2.0).unwrap();
        assert!(t > 0.0 && t < 1e-5, "{t}");
    }

    #[test]
    fn validation() {
        assert!(unquantized_threshold(0.0, 2, 2.0).is_err());
        assert!(unquantized_threshold(0.05, 0, 2.0).is_err());
        assert!(unquantized_threshold(0.05, 2, -1.0).is_err());
        let p = ChiSquareTestParams::new(0.05, 4, 2.0).unwrap();
        assert!(unquantized_decide(&[0.0; 3], &p).is_err());
        assert_eq!(
            unquantized_decide(&[0.0; 4], &p).unwrap().hypothesis,
            Hypothesis::H0
        );
    }

    #[test]
    fn empirical_false_alarm() {
        let sigma0_sq = 6.0;
        let dof = 40;
        let params = ChiSquareTestParams::new(0.05, dof, sigma0_sq).unwrap();
        assert!((params.rejection_probability(sigma0_sq).unwrap().value() - 0.05).abs() < 1e-12);
        let normal = Normal::new(0.0, (sigma0_sq / 2.0).sqrt()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 100_000;
        let mut samples = vec![0.0; dof];
        let mut hits = 0;
        for _ in 0..trials {
            samples
                .iter_mut()
                .for_each(|x| *x = normal.sample(&mut rng));
            if unquantized_decide(&samples, &params)
                .unwrap()
                .hypothesis
                .is_alternative()
            {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        let tol = 3.0 * (0.05 * 0.95 / trials as f64).sqrt();
        assert!((rate - 0.05).abs() < tol, "{rate}");
    }
}
