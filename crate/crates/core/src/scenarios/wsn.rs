use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{complex_normal, SampleSource};
use crate::detector::Hypothesis;
use crate::error::{check_range, Error, Result};
use crate::numerics::Count;
use crate::quantizer::ComparatorConfig;

/// Sensors probing for a weak transmitter over Rayleigh block fading.
///
/// Under H1 sensor `s` sees `sqrt(snr) h_s x_t + w_{s,t}` for `tau` symbols
/// with `h_s` fixed across the probe. With `complex_symbols` the pilot is
/// `x_t = (1 + j) / sqrt 2` and `h, w ~ CN(0, 1)`; otherwise `x_t = 1` and
/// `h, w ~ N(0, 1)`.
///
/// Per sensor the block holds the real parts of its `tau` samples followed
/// by the imaginary parts; sensors are concatenated in order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WsnScenario {
    pub sensors: Count,
    /// Average received SNR per symbol, linear.
    pub snr: f64,
    pub tau: Count,
    pub complex_symbols: bool,
}

impl WsnScenario {
    pub fn new(sensors: Count, snr: f64, tau: Count, complex_symbols: bool) -> Result<Self> {
        let s = Self {
            sensors,
            snr,
            tau,
            complex_symbols,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensors == 0 || self.tau == 0 {
            return Err(Error::InvalidScenario(
                "sensors and tau must be at least 1".into(),
            ));
        }
        check_range("snr", self.snr, self.snr >= 0.0, "snr >= 0")?;
        Ok(())
    }

    fn dims(&self) -> Count {
        if self.complex_symbols {
            2
        } else {
            1
        }
    }

    /// `1 / sqrt(1 + snr)`.
    pub fn alpha(&self) -> f64 {
        (1.0 + self.snr).sqrt().recip()
    }

    /// Comparator outputs of every sensor for one probe.
    pub fn simulate_probe<R: Rng + ?Sized>(
        &self,
        hypothesis: Hypothesis,
        c: f64,
        rng: &mut R,
    ) -> Result<Vec<bool>> {
        let cfg = ComparatorConfig::new(c, self.null_variance().sqrt())?;
        let samples = self.generate(hypothesis, rng);
        Ok(samples.iter().map(|&x| cfg.bit(x)).collect())
    }
}

impl SampleSource for WsnScenario {
    fn len(&self) -> Count {
        self.sensors * self.tau * self.dims()
    }

    fn null_variance(&self) -> f64 {
        1.0 / self.dims() as f64
    }

    fn alt_variance(&self) -> f64 {
        (1.0 + self.snr) / self.dims() as f64
    }

    fn is_iid(&self) -> bool {
        self.tau == 1 || self.snr == 0.0
    }

    fn fill<R: Rng + ?Sized>(&self, hypothesis: Hypothesis, rng: &mut R, out: &mut [f64]) {
        let tau = self.tau;
        let amp = if hypothesis.is_alternative() {
            self.snr.sqrt()
        } else {
            0.0
        };
        let stride = tau * self.dims();
        for sensor in out.chunks_exact_mut(stride) {
            if self.complex_symbols {
                let h = if amp > 0.0 {
                    complex_normal(rng, 1.0) * amp
                } else {
                    Default::default()
                };
                let x = num_complex::Complex64::new(1.0, 1.0) * std::f64::consts::FRAC_1_SQRT_2;
                let (re, im) = sensor.split_at_mut(tau);
                for t in 0..tau {
                    let y = h * x + complex_normal(rng, 1.0);
                    re[t] = y.re;
                    im[t] = y.im;
                }
            } else {
                let h: f64 = if amp > 0.0 {
                    let g: f64 = StandardNormal.sample(rng);
                    amp * g
                } else {
                    0.0
                };
                for y in sensor.iter_mut() {
                    let w: f64 = StandardNormal.sample(rng);
                    *y = h + w;
                }
            }
        }
    }
}
