//! TOML run configuration.
//!
//! Every section has defaults matching the reference setups, so an empty
//! file (or no file at all) is a valid configuration. Powers given in
//! decibels use `_db` keys; everything else is linear.

use bitdensity::scenarios::{db_to_linear, JammerPilot, MimoScenario, UserLink, WsnScenario};
use bitdensity::Count;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A scalar or a list of scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<T> From<Vec<T>> for OneOrMany<T> {
    fn from(v: Vec<T>) -> Self {
        OneOrMany::Many(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub format: Option<Format>,
    pub paired_baseline: Option<bool>,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub roc: RocSection,
    #[serde(default)]
    pub sweep_c: SweepSection,
    #[serde(default)]
    pub mimo: MimoSection,
    #[serde(default)]
    pub wsn: WsnSection,
    #[serde(default)]
    pub bsc: BscSection,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub n: OneOrMany<Count>,
    pub p_f: OneOrMany<f64>,
    pub c: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        Self {
            n: vec![320, 1280, 2560].into(),
            p_f: OneOrMany::One(0.05),
            c: 1.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RocSection {
    /// Block lengths for the i.i.d. Gaussian model. Must be absent when a
    /// `mimo` or `wsn` model is given.
    pub n: Option<OneOrMany<Count>>,
    pub c: f64,
    /// Variance ratio of the i.i.d. Gaussian model.
    pub alpha: f64,
    pub p_f: OneOrMany<f64>,
    pub mimo: Option<MimoPoint>,
    pub wsn: Option<WsnPoint>,
}

impl Default for RocSection {
    fn default() -> Self {
        Self {
            n: None,
            c: 1.6,
            alpha: 0.8,
            p_f: vec![0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5].into(),
            mimo: None,
            wsn: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n: Count,
    pub p_f: OneOrMany<f64>,
    pub alpha: OneOrMany<f64>,
    pub c_start: f64,
    pub c_stop: f64,
    pub c_step: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            n: 200,
            p_f: OneOrMany::One(0.05),
            alpha: vec![0.8, 0.85, 0.9].into(),
            c_start: 0.1,
            c_stop: 4.0,
            c_step: 0.05,
        }
    }
}

/// One massive-MIMO operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MimoPoint {
    pub antennas: Count,
    pub blocks: Count,
    pub users: Count,
    pub tau: Count,
    pub user_power_db: f64,
    pub jammer_power_db: f64,
    pub jammer_antennas: Count,
    /// Defaults to spoofing user 0 for one jammer antenna, random QPSK
    /// otherwise.
    pub jammer_pilot: Option<JammerPilot>,
    pub noise_var: f64,
    pub use_all_pilots: bool,
}

impl Default for MimoPoint {
    fn default() -> Self {
        Self {
            antennas: 32,
            blocks: 1,
            users: 5,
            tau: 5,
            user_power_db: 0.0,
            jammer_power_db: -4.0,
            jammer_antennas: 1,
            jammer_pilot: None,
            noise_var: 1.0,
            use_all_pilots: true,
        }
    }
}

impl MimoPoint {
    pub fn scenario(&self) -> Result<MimoScenario, CliError> {
        let s = MimoScenario {
            antennas: self.antennas,
            blocks: self.blocks,
            tau: self.tau,
            users: vec![
                UserLink {
                    power: db_to_linear(self.user_power_db),
                    beta: 1.0,
                };
                self.users
            ],
            jammer_power: db_to_linear(self.jammer_power_db),
            jammer_beta: 1.0,
            jammer_antennas: self.jammer_antennas,
            jammer_pilot: self.jammer_pilot.unwrap_or(if self.jammer_antennas > 1 {
                JammerPilot::RandomQpsk
            } else {
                JammerPilot::Spoof { target: 0 }
            }),
            noise_var: self.noise_var,
            use_all_pilots: self.use_all_pilots,
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MimoSection {
    pub antennas: OneOrMany<Count>,
    pub blocks: Count,
    pub users: Count,
    pub tau: Count,
    pub user_power_db: f64,
    pub jammer_power_db: OneOrMany<f64>,
    pub jammer_antennas: OneOrMany<Count>,
    pub jammer_pilot: Option<JammerPilot>,
    pub noise_var: f64,
    pub use_all_pilots: bool,
    pub p_f: f64,
    pub c: f64,
}

impl Default for MimoSection {
    fn default() -> Self {
        let p = MimoPoint::default();
        Self {
            antennas: vec![32, 128, 256].into(),
            blocks: p.blocks,
            users: p.users,
            tau: p.tau,
            user_power_db: p.user_power_db,
            jammer_power_db: vec![-10.0, -8.0, -6.0, -4.0, -2.0, 0.0].into(),
            jammer_antennas: OneOrMany::One(1),
            jammer_pilot: None,
            noise_var: p.noise_var,
            use_all_pilots: p.use_all_pilots,
            p_f: 0.05,
            c: 1.6,
        }
    }
}

impl MimoSection {
    /// Grid points in output order: antennas, then jammer antennas, then
    /// jammer power.
    pub fn points(&self) -> Vec<MimoPoint> {
        let mut out = Vec::new();
        for antennas in self.antennas.to_vec() {
            for jammer_antennas in self.jammer_antennas.to_vec() {
                for jammer_power_db in self.jammer_power_db.to_vec() {
                    out.push(MimoPoint {
                        antennas,
                        blocks: self.blocks,
                        users: self.users,
                        tau: self.tau,
                        user_power_db: self.user_power_db,
                        jammer_power_db,
                        jammer_antennas,
                        jammer_pilot: self.jammer_pilot,
                        noise_var: self.noise_var,
                        use_all_pilots: self.use_all_pilots,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WsnPoint {
    pub sensors: Count,
    pub snr_db: f64,
    pub tau: Count,
    pub complex_symbols: bool,
}

impl Default for WsnPoint {
    fn default() -> Self {
        Self {
            sensors: 20,
            snr_db: -4.0,
            tau: 1,
            complex_symbols: true,
        }
    }
}

impl WsnPoint {
    pub fn scenario(&self) -> Result<WsnScenario, CliError> {
        Ok(WsnScenario::new(
            self.sensors,
            db_to_linear(self.snr_db),
            self.tau,
            self.complex_symbols,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WsnSection {
    pub sensors: OneOrMany<Count>,
    pub snr_db: OneOrMany<f64>,
    pub tau: OneOrMany<Count>,
    pub complex_symbols: bool,
    pub p_f: f64,
    pub c: f64,
}

impl Default for WsnSection {
    fn default() -> Self {
        Self {
            sensors: OneOrMany::One(20),
            snr_db: OneOrMany::One(-4.0),
            tau: vec![1, 2, 3, 4].into(),
            complex_symbols: true,
            p_f: 0.05,
            c: 1.6,
        }
    }
}

impl WsnSection {
    /// Grid points in output order: sensors, then SNR, then probe length.
    pub fn points(&self) -> Vec<WsnPoint> {
        let mut out = Vec::new();
        for sensors in self.sensors.to_vec() {
            for snr_db in self.snr_db.to_vec() {
                for tau in self.tau.to_vec() {
                    out.push(WsnPoint {
                        sensors,
                        snr_db,
                        tau,
                        complex_symbols: self.complex_symbols,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BscSection {
    pub n: Count,
    pub sigma0_sq: f64,
    pub delta_var: f64,
    pub epsilon: OneOrMany<f64>,
    pub p_f: f64,
    pub c: f64,
}

impl Default for BscSection {
    fn default() -> Self {
        Self {
            n: 200,
            sigma0_sq: 1.0,
            delta_var: 0.5,
            epsilon: vec![0.0, 0.01, 0.05, 0.1, 0.2, 0.3, 0.5].into(),
            p_f: 0.05,
            c: 1.6,
        }
    }
}
