use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SampleSource, Scenario};
use crate::baseline::ChiSquareTestParams;
use crate::detector::{BscChannel, DetectorParams, Hypothesis};
use crate::error::{check_range, Error, Result};
use crate::numerics::Count;
use crate::quantizer::alt_success_rate;

/// One detector configuration to evaluate against a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSelection {
    pub p_f: f64,
    pub c: f64,
    /// Bits cross this channel before the decision when set.
    pub bsc: Option<BscChannel>,
    /// Also run the unquantized energy detector on the same samples.
    pub paired_baseline: bool,
}

impl DetectorSelection {
    pub fn new(p_f: f64, c: f64) -> Self {
        Self {
            p_f,
            c,
            bsc: None,
            paired_baseline: false,
        }
    }

    pub fn with_baseline(mut self) -> Self {
        self.paired_baseline = true;
        self
    }

    pub fn with_bsc(mut self, ch: BscChannel) -> Self {
        self.bsc = Some(ch);
        self
    }
}

/// Empirical rate with a 3-sigma binomial half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub hits: u64,
    pub value: f64,
    pub ci: f64,
}

impl Estimate {
    pub fn from_hits(hits: u64, trials: u64) -> Self {
        let value = hits as f64 / trials as f64;
        Self {
            hits,
            value,
            ci: 3.0 * (value * (1.0 - value) / trials as f64).sqrt(),
        }
    }

    /// Whether `target` lies within three binomial standard deviations of
    /// the estimate, with the deviation taken at `target` itself so that a
    /// zero-hit estimate is not trivially exact.
    pub fn agrees_with(&self, target: f64, trials: u64) -> bool {
        let sd = (target * (1.0 - target) / trials as f64).sqrt();
        (self.value - target).abs() <= 3.0 * sd.max(self.ci / 3.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub threshold: f64,
    pub empirical_pf: Estimate,
    pub empirical_pd: Estimate,
    pub theory_pd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: u64,
    pub p_f: f64,
    pub c: f64,
    pub epsilon: Option<f64>,
    pub n: Count,
    pub gamma: Count,
    pub zeta: f64,
    pub alpha: f64,
    pub empirical_pf: Estimate,
    pub empirical_pd: Estimate,
    pub theory_pd: f64,
    /// False when in-block correlation makes `theory_pd` an approximation.
    pub theory_exact: bool,
    pub baseline: Option<BaselineReport>,
    /// Not serialized: reports must be reproducible byte for byte.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    false_alarms: u64,
    detections: u64,
    base_false_alarms: u64,
    base_detections: u64,
}

/// Everything about a run that follows from the configuration alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub n: Count,
    pub gamma: Count,
    pub zeta: f64,
    pub alpha: f64,
    pub theory_pd: f64,
    pub theory_exact: bool,
    /// Energy threshold and predicted power of the paired baseline.
    pub baseline: Option<(f64, f64)>,
}

struct Prepared {
    sel: DetectorSelection,
    params: DetectorParams,
    level: f64,
    baseline: Option<ChiSquareTestParams>,
    plan: RunPlan,
}

fn trial_rng(base: &ChaCha8Rng, trial: u64, hypothesis: Hypothesis) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(2 * trial + u64::from(hypothesis.is_alternative()));
    rng
}

fn prepare(scenario: &Scenario, sel: &DetectorSelection) -> Result<Prepared> {
    scenario.validate()?;
    check_range("c", sel.c, sel.c > 0.0, "c > 0")?;
    let n = scenario.len();
    let ratio = scenario.variance_ratio()?;
    let params = match sel.bsc {
        Some(ch) => crate::detector::bsc_params(n, sel.p_f, sel.c, ch)?,
        None => DetectorParams::new(n, sel.p_f, sel.c)?,
    };
    let theta1 = alt_success_rate(sel.c, ratio)?.value();
    let theta1 = match sel.bsc {
        Some(ch) => ch.through(theta1).value(),
        None => theta1,
    };
    let baseline = if sel.paired_baseline {
        Some(ChiSquareTestParams::new(
            sel.p_f,
            n,
            2.0 * scenario.null_variance(),
        )?)
    } else {
        None
    };
    let baseline_plan = match baseline {
        Some(b) => Some((
            b.threshold(),
            b.rejection_probability(2.0 * scenario.alt_variance())?
                .value(),
        )),
        None => None,
    };
    let plan = RunPlan {
        n,
        gamma: params.gamma(),
        zeta: params.zeta().value(),
        alpha: ratio.value(),
        theory_pd: params.rejection_probability(theta1)?.value(),
        theory_exact: scenario.is_iid(),
        baseline: baseline_plan,
    };
    Ok(Prepared {
        sel: *sel,
        params,
        level: sel.c * scenario.null_variance().sqrt(),
        baseline,
        plan,
    })
}

/// Validates `selection` against `scenario` and computes the detector
/// parameters and closed-form predictions without simulating.
pub fn plan(scenario: &Scenario, selection: &DetectorSelection) -> Result<RunPlan> {
    prepare(scenario, selection).map(|p| p.plan)
}

/// Runs every selection on shared sample streams.
///
/// Trial `t` under hypothesis `h` draws from ChaCha8 stream `2t + h` of the
/// master seed, so results do not depend on thread count or scheduling. All
/// selections, and the paired baselines, see the same samples.
pub fn run_monte_carlo_multi(
    scenario: &Scenario,
    selections: &[DetectorSelection],
    trials: u64,
    seed: u64,
) -> Result<Vec<TrialReport>> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            expected: "trials >= 1",
        });
    }
    let prepared = selections
        .iter()
        .map(|s| prepare(scenario, s))
        .collect::<Result<Vec<_>>>()?;
    let started = Instant::now();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let n = scenario.len();
    let need_energy = prepared.iter().any(|p| p.baseline.is_some());

    let tallies = (0..trials)
        .into_par_iter()
        .fold(
            || (vec![Tally::default(); prepared.len()], vec![0.0; n]),
            |(mut tally, mut buf), trial| {
                for hyp in [Hypothesis::H0, Hypothesis::H1] {
                    let mut rng = trial_rng(&base, trial, hyp);
                    scenario.fill(hyp, &mut rng, &mut buf);
                    let energy = if need_energy {
                        buf.iter().map(|x| x * x).sum::<f64>()
                    } else {
                        0.0
                    };
                    for (p, t) in prepared.iter().zip(tally.iter_mut()) {
                        let ones = match p.sel.bsc {
                            None => buf.iter().filter(|x| x.abs() > p.level).count(),
                            Some(ch) => buf
                                .iter()
                                .filter(|x| ch.flip(x.abs() > p.level, &mut rng))
                                .count(),
                        };
                        let h1 = p
                            .params
                            .decide_count(ones, &mut rng)
                            .hypothesis
                            .is_alternative();
                        let base_h1 = p
                            .baseline
                            .map(|b| b.decide_energy(energy).hypothesis.is_alternative())
                            .unwrap_or(false);
                        match hyp {
                            Hypothesis::H0 => {
                                t.false_alarms += u64::from(h1);
                                t.base_false_alarms += u64::from(base_h1);
                            }
                            Hypothesis::H1 => {
                                t.detections += u64::from(h1);
                                t.base_detections += u64::from(base_h1);
                            }
                        }
                    }
                }
                (tally, buf)
            },
        )
        .map(|(tally, _)| tally)
        .reduce(
            || vec![Tally::default(); prepared.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.false_alarms += y.false_alarms;
                    x.detections += y.detections;
                    x.base_false_alarms += y.base_false_alarms;
                    x.base_detections += y.base_detections;
                }
                a
            },
        );
    let wall_time = started.elapsed();

    Ok(prepared
        .iter()
        .zip(tallies)
        .map(|(p, t)| TrialReport {
            scenario: scenario.clone(),
            seed,
            trials,
            p_f: p.sel.p_f,
            c: p.sel.c,
            epsilon: p.sel.bsc.map(|ch| ch.epsilon()),
            n,
            gamma: p.plan.gamma,
            zeta: p.plan.zeta,
            alpha: p.plan.alpha,
            empirical_pf: Estimate::from_hits(t.false_alarms, trials),
            empirical_pd: Estimate::from_hits(t.detections, trials),
            theory_pd: p.plan.theory_pd,
            theory_exact: p.plan.theory_exact,
            baseline: p
                .plan
                .baseline
                .map(|(threshold, theory_pd)| BaselineReport {
                    threshold,
                    empirical_pf: Estimate::from_hits(t.base_false_alarms, trials),
                    empirical_pd: Estimate::from_hits(t.base_detections, trials),
                    theory_pd,
                }),
            wall_time,
        })
        .collect())
}

/// Runs one detector against `trials` blocks per hypothesis.
pub fn run_monte_carlo(
    scenario: &Scenario,
    selection: &DetectorSelection,
    trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    run_monte_carlo_multi(scenario, std::slice::from_ref(selection), trials, seed)
        .map(|mut v| v.remove(0))
}
