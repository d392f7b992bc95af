use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{complex_normal, SampleSource};
use crate::detector::Hypothesis;
use crate::error::{check_range, Error, Result};
use crate::numerics::Count;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserLink {
    /// Average transmit power, linear.
    pub power: f64,
    /// Large-scale fading coefficient.
    pub beta: f64,
}

impl UserLink {
    fn gain(&self) -> f64 {
        self.power * self.beta
    }
}

/// What the jammer transmits during the training phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JammerPilot {
    /// Every jammer antenna replays the pilot of user `target`.
    Spoof { target: usize },
    /// Independent unit-power QPSK symbols per antenna and per time slot.
    RandomQpsk,
}

/// Uplink training of a single-cell massive-MIMO system, optionally jammed.
///
/// Each coherence block draws fresh Rayleigh channels for all users and
/// jammer antennas. Either the first pilot symbol of every block is used
/// (`n = 2 M N`) or, when `K = tau`, all `tau` pilot symbols are
/// (`n = 2 M tau N`). User pilots are the rows of the `tau`-point DFT, so
/// they are orthogonal and unit modulus.
///
/// Samples are stacked as `[Re(Y); Im(Y)]` with `Y` (M x columns) read
/// column-major: the whole real plane first, then the imaginary plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimoScenario {
    pub antennas: Count,
    pub blocks: Count,
    pub tau: Count,
    pub users: Vec<UserLink>,
    /// Per-antenna jammer power, linear. Zero disables the jammer.
    pub jammer_power: f64,
    pub jammer_beta: f64,
    pub jammer_antennas: Count,
    pub jammer_pilot: JammerPilot,
    pub noise_var: f64,
    pub use_all_pilots: bool,
}

impl MimoScenario {
    /// `k` identical users with unit large-scale fading, unit noise and a
    /// pilot-spoofing jammer aimed at user 0 (random QPSK when it has more
    /// than one antenna).
    #[allow(clippy::too_many_arguments)]
    pub fn symmetric(
        antennas: Count,
        blocks: Count,
        k: Count,
        tau: Count,
        user_power: f64,
        jammer_power: f64,
        jammer_antennas: Count,
        use_all_pilots: bool,
    ) -> Result<Self> {
        let s = Self {
            antennas,
            blocks,
            tau,
            users: vec![
                UserLink {
                    power: user_power,
                    beta: 1.0
                };
                k
            ],
            jammer_power,
            jammer_beta: 1.0,
            jammer_antennas,
            jammer_pilot: if jammer_antennas > 1 {
                JammerPilot::RandomQpsk
            } else {
                JammerPilot::Spoof { target: 0 }
            },
            noise_var: 1.0,
            use_all_pilots,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.antennas == 0 || self.blocks == 0 || self.tau == 0 {
            return bad("antennas, blocks and tau must all be at least 1".into());
        }
        if self.jammer_antennas == 0 {
            return bad("jammer_antennas must be at least 1".into());
        }
        if self.use_all_pilots && self.users.len() != self.tau {
            return bad(format!(
                "using all pilot symbols needs K = tau (K = {}, tau = {})",
                self.users.len(),
                self.tau
            ));
        }
        if self.users.len() > self.tau {
            return bad(format!(
                "{} users cannot share {} orthogonal pilots",
                self.users.len(),
                self.tau
            ));
        }
        if let JammerPilot::Spoof { target } = self.jammer_pilot {
            if target >= self.users.len() {
                return bad(format!("spoofed user {target} does not exist"));
            }
        }
        for u in &self.users {
            check_range("user power", u.power, u.power >= 0.0, "power >= 0")?;
            check_range("user beta", u.beta, u.beta >= 0.0, "beta >= 0")?;
        }
        check_range(
            "jammer_power",
            self.jammer_power,
            self.jammer_power >= 0.0,
            "jammer_power >= 0",
        )?;
        check_range(
            "jammer_beta",
            self.jammer_beta,
            self.jammer_beta >= 0.0,
            "jammer_beta >= 0",
        )?;
        check_range(
            "noise_var",
            self.noise_var,
            self.noise_var > 0.0,
            "noise_var > 0",
        )?;
        Ok(())
    }

    /// `sigma0^2 = sum p_i beta_i + sigma_w^2`.
    pub fn sigma0_sq(&self) -> f64 {
        self.users.iter().map(UserLink::gain).sum::<f64>() + self.noise_var
    }

    /// `sigma1^2 = sigma0^2 + N_J p_J beta_J`.
    pub fn sigma1_sq(&self) -> f64 {
        self.sigma0_sq() + self.jammer_gain() * self.jammer_antennas as f64
    }

    fn jammer_gain(&self) -> f64 {
        self.jammer_power * self.jammer_beta
    }

    fn columns_per_block(&self) -> Count {
        if self.use_all_pilots {
            self.tau
        } else {
            1
        }
    }

    fn pilot(&self, user: usize, t: usize) -> Complex64 {
        let phase = 2.0 * std::f64::consts::PI * (user * t) as f64 / self.tau as f64;
        Complex64::from_polar(1.0, phase)
    }

    fn jammer_symbol<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> Complex64 {
        match self.jammer_pilot {
            JammerPilot::Spoof { target } => self.pilot(target, t),
            JammerPilot::RandomQpsk => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                let re = if rng.random::<bool>() { r } else { -r };
                let im = if rng.random::<bool>() { r } else { -r };
                Complex64::new(re, im)
            }
        }
    }
}

impl SampleSource for MimoScenario {
    fn len(&self) -> Count {
        2 * self.antennas * self.columns_per_block() * self.blocks
    }

    fn null_variance(&self) -> f64 {
        0.5 * self.sigma0_sq()
    }

    fn alt_variance(&self) -> f64 {
        0.5 * self.sigma1_sq()
    }

    fn is_iid(&self) -> bool {
        if self.columns_per_block() == 1 {
            return true;
        }
        // Orthogonal pilots whiten the block only when every user arrives
        // with the same gain; any jammer adds a non-white component.
        let first = self.users.first().map(UserLink::gain).unwrap_or(0.0);
        let equal = self.users.iter().all(|u| u.gain() == first);
        equal && self.jammer_gain() == 0.0
    }

    fn fill<R: Rng + ?Sized>(&self, hypothesis: Hypothesis, rng: &mut R, out: &mut [f64]) {
        let m = self.antennas;
        let cols = self.columns_per_block();
        let plane = m * cols * self.blocks;
        debug_assert_eq!(out.len(), 2 * plane);
        let jammed = hypothesis.is_alternative() && self.jammer_gain() > 0.0;
        let jam_streams = if jammed { self.jammer_antennas } else { 0 };

        let mut h = vec![Complex64::default(); self.users.len() * m];
        let mut g = vec![Complex64::default(); jam_streams * m];
        let mut jam_symbols = vec![Complex64::default(); jam_streams];
        let mut column = vec![Complex64::default(); m];

        for block in 0..self.blocks {
            for (i, user) in self.users.iter().enumerate() {
                let amp = user.gain().sqrt();
                for coef in &mut h[i * m..(i + 1) * m] {
                    *coef = complex_normal(rng, 1.0) * amp;
                }
            }
            let jam_amp = self.jammer_gain().sqrt();
            for coef in g.iter_mut() {
                *coef = complex_normal(rng, 1.0) * jam_amp;
            }
            for t in 0..cols {
                for sym in jam_symbols.iter_mut() {
                    *sym = self.jammer_symbol(t, rng);
                }
                for (a, y) in column.iter_mut().enumerate() {
                    *y = complex_normal(rng, self.noise_var);
                    for i in 0..self.users.len() {
                        *y += h[i * m + a] * self.pilot(i, t);
                    }
                    for (j, sym) in jam_symbols.iter().enumerate() {
                        *y += g[j * m + a] * sym;
                    }
                }
                let offset = (block * cols + t) * m;
                for (a, y) in column.iter().enumerate() {
                    out[offset + a] = y.re;
                    out[plane + offset + a] = y.im;
                }
            }
        }
    }
}
