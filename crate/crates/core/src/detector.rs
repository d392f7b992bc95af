//! Bit density detection: a randomized binomial threshold test on the number
//! of ones in a block of comparator outputs.
//!
//! The threshold `gamma` and randomization weight `zeta` are fixed offline
//! from `(n, p_f, c)` so that the false-alarm rate equals `p_f` exactly:
//!
//! ```text
//! P(S > gamma | H0) + zeta * P(S = gamma | H0) = p_f
//! ```
//!
//! Nothing about the alternative is needed to run the test; `alpha` only
//! enters when predicting its power.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::numerics::{
    binomial_ln_pmf, binomial_sf, binomial_tails, binomial_upper_quantile, q_function, q_inverse,
    Count, Probability,
};
use crate::quantizer::{alt_success_rate, null_success_rate, VarianceRatio};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    pub fn is_alternative(self) -> bool {
        self == Hypothesis::H1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub hypothesis: Hypothesis,
    /// Set when the count landed exactly on the threshold and a coin decided.
    pub randomized: bool,
}

impl Decision {
    pub fn deterministic(hypothesis: Hypothesis) -> Self {
        Self {
            hypothesis,
            randomized: false,
        }
    }
}

fn check_n(n: Count) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            expected: "n >= 1",
        });
    }
    Ok(())
}

fn check_c(c: f64) -> Result<f64> {
    check_range(
        "c",
        c,
        c > 0.0,
        "c > 0 (use the c -> 0 limit for a zero-width window)",
    )
}

/// Fully resolved decision rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    n: Count,
    p_f: Probability,
    theta0: Probability,
    gamma: Count,
    zeta: Probability,
}

impl DetectorParams {
    /// Parameters for a window comparator of width `c` feeding `n` bits.
    pub fn new(n: Count, p_f: f64, c: f64) -> Result<Self> {
        check_c(c)?;
        Self::for_null_rate(n, p_f, null_success_rate(c)?.value())
    }

    /// Parameters for any Bernoulli null rate, e.g. after a noisy link.
    pub fn for_null_rate(n: Count, p_f: f64, theta0: f64) -> Result<Self> {
        check_n(n)?;
        let p_f = Probability::open("p_f", p_f)?;
        let theta0 = Probability::new(theta0)?;
        let gamma = binomial_upper_quantile(p_f.value(), n, theta0.value())?;
        let zeta = zeta_for(n, p_f.value(), theta0.value(), gamma)?;
        Ok(Self {
            n,
            p_f,
            theta0,
            gamma,
            zeta,
        })
    }

    pub fn n(&self) -> Count {
        self.n
    }

    pub fn p_f(&self) -> Probability {
        self.p_f
    }

    pub fn theta0(&self) -> Probability {
        self.theta0
    }

    pub fn gamma(&self) -> Count {
        self.gamma
    }

    pub fn zeta(&self) -> Probability {
        self.zeta
    }

    /// `P(decide H1)` when each bit is one with probability `theta`.
    pub fn rejection_probability(&self, theta: f64) -> Result<Probability> {
        let (_, above) = binomial_tails(self.gamma, self.n, theta)?;
        let at = binomial_ln_pmf(self.gamma, self.n, theta)?.exp();
        Ok(Probability::clamped(above + self.zeta.value() * at))
    }

    /// Closed-form false-alarm rate; equals `p_f` up to rounding.
    pub fn false_alarm_probability(&self) -> Probability {
        self.rejection_probability(self.theta0.value())
            .expect("theta0 validated at construction")
    }

    /// Decision for an observed count of ones. Draws one uniform only on a tie.
    pub fn decide_count<R: Rng + ?Sized>(&self, ones: Count, rng: &mut R) -> Decision {
        use std::cmp::Ordering;
        match ones.cmp(&self.gamma) {
            Ordering::Greater => Decision::deterministic(Hypothesis::H1),
            Ordering::Less => Decision::deterministic(Hypothesis::H0),
            Ordering::Equal => {
                let x: f64 = rng.random();
                Decision {
                    hypothesis: if x < self.zeta.value() {
                        Hypothesis::H1
                    } else {
                        Hypothesis::H0
                    },
                    randomized: true,
                }
            }
        }
    }

    pub fn decide<R: Rng + ?Sized>(&self, bits: &[bool], rng: &mut R) -> Result<Decision> {
        if bits.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: bits.len(),
            });
        }
        let ones = bits.iter().filter(|&&b| b).count();
        Ok(self.decide_count(ones, rng))
    }
}

/// Smallest `gamma` with `P(S <= gamma | H0) >= 1 - p_f` for `S ~ Bin(n, 2Q(c))`.
pub fn compute_threshold(n: Count, p_f: f64, c: f64) -> Result<Count> {
    DetectorParams::new(n, p_f, c).map(|p| p.gamma)
}

/// Normal approximation to the threshold:
/// `floor(sqrt(n theta0 (1 - theta0)) Q^{-1}(p_f) + n theta0)`.
///
/// Good to within one count once `n theta0 (1 - theta0)` is in the tens.
pub fn approx_threshold(n: Count, p_f: f64, c: f64) -> Result<Count> {
    check_n(n)?;
    let p_f = Probability::open("p_f", p_f)?;
    check_c(c)?;
    let theta0 = 2.0 * q_function(c)?;
    let mean = n as f64 * theta0;
    let sd = (mean * (1.0 - theta0)).sqrt();
    let value = (sd * q_inverse(p_f.value())? + mean).floor();
    Ok(value.clamp(0.0, n as f64) as Count)
}

fn zeta_for(n: Count, p_f: f64, theta0: f64, gamma: Count) -> Result<Probability> {
    let above = binomial_sf(gamma, n, theta0)?;
    let at = binomial_ln_pmf(gamma, n, theta0)?.exp();
    if at == 0.0 {
        return Err(Error::Inconsistent(format!(
            "P(S = {gamma}) underflows to zero for n = {n}, theta0 = {theta0}"
        )));
    }
    Ok(Probability::clamped((p_f - above) / at))
}

/// Randomization weight that tops the false-alarm rate up to exactly `p_f`.
pub fn compute_zeta(n: Count, p_f: f64, c: f64, gamma: Count) -> Result<Probability> {
    check_n(n)?;
    let p_f = Probability::open("p_f", p_f)?;
    check_c(c)?;
    if gamma > n {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma as f64,
            expected: "gamma <= n",
        });
    }
    zeta_for(n, p_f.value(), 2.0 * q_function(c)?, gamma)
}

/// Closed-form detection probability.
///
/// `P(S > gamma | H1) + zeta P(S = gamma | H1)` with `S ~ Bin(n, 2Q(alpha c))`.
/// The tie term is formed from the alternative pmf directly rather than
/// through the ratio `(Q(c)/Q(alpha c))^gamma`, which overflows for large
/// `gamma`.
pub fn detection_probability(n: Count, p_f: f64, c: f64, alpha: f64) -> Result<Probability> {
    let ratio = VarianceRatio::new(alpha)?;
    let params = DetectorParams::new(n, p_f, c)?;
    params.rejection_probability(alt_success_rate(c, ratio)?.value())
}

/// Detection probability of the degenerate zero-width window, and of the
/// infinitely wide one: both collapse to the false-alarm rate.
pub fn detection_probability_limit_c(p_f: Probability) -> Probability {
    p_f
}

/// Binary symmetric channel between the comparators and the decision maker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BscChannel {
    epsilon: f64,
}

impl BscChannel {
    /// Crossover probability in `[0, 0.5]`; larger values are relabelings.
    pub fn new(epsilon: f64) -> Result<Self> {
        check_range(
            "epsilon",
            epsilon,
            (0.0..=0.5).contains(&epsilon),
            "0 <= epsilon <= 0.5",
        )?;
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Rate of ones after the channel for a source rate `theta`.
    pub fn through(&self, theta: f64) -> Probability {
        let e = self.epsilon;
        Probability::clamped(e * (1.0 - theta) + (1.0 - e) * theta)
    }

    pub fn flip<R: Rng + ?Sized>(&self, bit: bool, rng: &mut R) -> bool {
        if self.epsilon > 0.0 && rng.random::<f64>() < self.epsilon {
            !bit
        } else {
            bit
        }
    }
}

/// `(theta0', theta1')`: the null and alternative rates seen after the channel.
pub fn bsc_success_rates(c: f64, alpha: f64, ch: BscChannel) -> Result<(Probability, Probability)> {
    let ratio = VarianceRatio::new(alpha)?;
    let theta0 = null_success_rate(c)?;
    let theta1 = alt_success_rate(c, ratio)?;
    Ok((ch.through(theta0.value()), ch.through(theta1.value())))
}

/// Detector parameters re-derived for the post-channel null rate.
pub fn bsc_params(n: Count, p_f: f64, c: f64, ch: BscChannel) -> Result<DetectorParams> {
    check_c(c)?;
    let (theta0, _) = bsc_success_rates(c, 1.0, ch)?;
    DetectorParams::for_null_rate(n, p_f, theta0.value())
}

/// Detection probability when the bits cross a binary symmetric channel and
/// the threshold is recomputed for the degraded null rate.
pub fn detection_probability_bsc(
    n: Count,
    p_f: f64,
    c: f64,
    alpha: f64,
    ch: BscChannel,
) -> Result<Probability> {
    let params = bsc_params(n, p_f, c, ch)?;
    let (_, theta1) = bsc_success_rates(c, alpha, ch)?;
    params.rejection_probability(theta1.value())
}

/// Grid point maximizing [`detection_probability`]; ties go to the smaller `c`.
pub fn optimal_c(n: Count, p_f: f64, alpha: f64, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidScenario("empty c grid".into()));
    }
    let mut best: Option<(f64, f64)> = None;
    for &c in grid {
        check_range("c", c, (0.1..=4.0).contains(&c), "0.1 <= c <= 4")?;
        let pd = detection_probability(n, p_f, c, alpha)?.value();
        best = match best {
            Some((bc, bp)) if bp > pd || (bp == pd && bc <= c) => Some((bc, bp)),
            _ => Some((c, pd)),
        };
    }
    Ok(best.map(|(c, _)| c).expect("non-empty grid"))
}

/// `start, start + step, ..` up to and including `stop` (within rounding).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    check_range("step", step, step > 0.0, "step > 0")?;
    check_range("stop", stop, stop >= start, "stop >= start")?;
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}
