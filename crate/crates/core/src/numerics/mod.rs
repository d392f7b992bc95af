//! Special functions and discrete-distribution primitives.
//!
//! Everything here is a pure function of its arguments. Binomial tails are
//! summed in log space starting from the end nearest the tail, so the
//! thresholds used by the detector stay exact for `n` in the tens of
//! thousands.

mod binomial;
mod gamma;
mod normal;

pub use binomial::{
    binomial_cdf, binomial_inverse_cdf, binomial_ln_pmf, binomial_pmf, binomial_sf, binomial_tails,
    binomial_upper_quantile,
};
pub use gamma::{
    chi_square_cdf, chi_square_inverse_cdf, chi_square_inverse_sf, chi_square_sf,
    regularized_gamma_p, regularized_gamma_q,
};
pub use normal::{normal_pdf, q_function, q_inverse};

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

/// Number of binary observations, or a count of ones among them.
pub type Count = usize;

/// A validated probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        check_range(
            "probability",
            value,
            (0.0..=1.0).contains(&value),
            "0 <= p <= 1",
        )
        .map(Probability)
    }

    /// Like [`Probability::new`] but rejects the endpoints.
    pub fn open(name: &'static str, value: f64) -> Result<Self> {
        check_range(name, value, value > 0.0 && value < 1.0, "0 < p < 1").map(Probability)
    }

    /// Clamps round-off excursions back into `[0, 1]`.
    pub(crate) fn clamped(value: f64) -> Self {
        Probability(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = crate::Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl std::fmt::Display for Probability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Smallest `k` in `0..=n` for which `pred(k)` holds.
///
/// `pred` must be monotone (false then true) and true at `n`. The search
/// gallops outward from `seed` and then bisects.
pub(crate) fn smallest_count(n: Count, seed: Count, mut pred: impl FnMut(Count) -> bool) -> Count {
    let seed = seed.min(n);
    // Invariant: pred(hi) holds; pred(lo) fails, with lo = None meaning "-1".
    let (mut lo, mut hi): (Option<Count>, Count);
    if pred(seed) {
        hi = seed;
        lo = None;
        let mut step = 1;
        while hi > 0 {
            let probe = hi.saturating_sub(step);
            if pred(probe) {
                hi = probe;
                step *= 2;
            } else {
                lo = Some(probe);
                break;
            }
        }
    } else {
        lo = Some(seed);
        hi = n;
        let mut step = 1;
        loop {
            let probe = seed.saturating_add(step).min(n);
            if probe >= hi {
                break;
            }
            if pred(probe) {
                hi = probe;
                break;
            }
            lo = Some(probe);
            step *= 2;
        }
    }
    loop {
        let low = match lo {
            None if hi == 0 => return 0,
            None => {
                if pred(0) {
                    return 0;
                }
                lo = Some(0);
                continue;
            }
            Some(l) => l,
        };
        if hi - low <= 1 {
            return hi;
        }
        let mid = low + (hi - low) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = Some(mid);
        }
    }
}
