//! Bit density detection over 1-bit window-comparator observations.
//!
//! A window comparator emits `1` when a sample leaves the band
//! `[-c*sigma0, c*sigma0]`. Under the null hypothesis the bits are i.i.d.
//! Bernoulli with a rate that depends on `c` alone, so a growth in input
//! variance shows up as an excess of ones. The detector counts them and
//! applies a randomized binomial threshold test that hits its target false
//! alarm rate exactly.
//!
//! Modules:
//! - [`numerics`]: normal, binomial and chi-square primitives.
//! - [`quantizer`]: the comparator and its Bernoulli success rates.
//! - [`detector`]: thresholds, the randomized decision rule and closed-form
//!   detection probabilities, including a binary symmetric channel variant.
//! - [`baseline`]: the unquantized chi-square energy detector.
//! - [`scenarios`]: Gaussian, massive-MIMO and sensor-network generators and
//!   the Monte-Carlo harness.

pub mod baseline;
pub mod detector;
mod error;
pub mod numerics;
pub mod quantizer;
pub mod scenarios;

pub use error::{Error, Result};
pub use numerics::{Count, Probability};
