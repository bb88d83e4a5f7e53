//! Flat TOML run configuration.
//!
//! Every key is optional except `scenario`; missing keys take the defaults
//! listed on [`RunConfig`]. Unknown keys are rejected.
//!
//! ```toml
//! scenario = "epr_boosted"
//! seed = 7
//! n_trials = 10000
//! beta = 0.5
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spacetime::{norm3, BoostParameters, Vec3, BETA_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioId {
    EinsteinScreen,
    #[serde(rename = "decay_90")]
    Decay90,
    EprBoosted,
    PacketBoostDemo,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 4] =
        [ScenarioId::EinsteinScreen, ScenarioId::Decay90, ScenarioId::EprBoosted, ScenarioId::PacketBoostDemo];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioId::EinsteinScreen => "einstein_screen",
            ScenarioId::Decay90 => "decay_90",
            ScenarioId::EprBoosted => "epr_boosted",
            ScenarioId::PacketBoostDemo => "packet_boost_demo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenProfile {
    Isotropic,
    Cosine,
}

/// Parameters of one run. Defaults are shown per field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Required.
    pub scenario: ScenarioId,
    /// Master seed. Default 1.
    pub seed: u64,
    /// Default 10000.
    pub n_trials: usize,
    /// Boost speed, `|beta| < 1`. Default 0.5.
    pub beta: f64,
    /// Boost direction, normalized on use. Default `[1, 0, 0]`.
    pub boost_axis: Vec3,
    /// Default `"out"`.
    pub output_dir: String,
    /// Run trials on the thread pool. Default true.
    pub parallel: bool,
    /// Particle mass. Default 1.
    pub mass: f64,
    /// Center of the decay momentum profile `g`. Default 1.
    pub decay_k0: f64,
    /// Width of `g`. Default 0.05.
    pub decay_width: f64,
    /// Radial samples of `g`. Default 201.
    pub decay_samples: usize,
    /// Source-to-detector distances for `decay_90`. Default `[1, 1]`.
    pub detector_distances: [f64; 2],
    /// Acceptance half-angle in degrees. Default 20.
    pub detector_half_angle_deg: f64,
    /// Analyzer angles in degrees, measured from z in the x-z plane.
    /// Defaults 0, 90, 45, 135.
    pub angle_a_deg: f64,
    pub angle_a2_deg: f64,
    pub angle_b_deg: f64,
    pub angle_b2_deg: f64,
    /// Distance between the two spin detectors. Default 2.
    pub detector_separation: f64,
    /// Equal-`cos(theta)` rings on the screen. Default 4.
    pub screen_rings: usize,
    /// Azimuthal sectors per ring. Default 8.
    pub screen_sectors: usize,
    /// Default `"isotropic"`.
    pub screen_profile: ScreenProfile,
    /// Exponent of the `cosine` profile. Default 1.
    pub screen_cosine_power: u32,
    /// Packet center momentum for `packet_boost_demo`. Default 0.3.
    pub packet_center: f64,
    /// Packet momentum width. Default 0.1.
    pub packet_sigma: f64,
    /// Momentum grid samples. Default 2048.
    pub grid_samples: usize,
    /// Momentum grid half-span. Default 4.5.
    pub grid_k_max: f64,
    /// Default `"instantaneous-born"`.
    pub policy: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: ScenarioId::EprBoosted,
            seed: 1,
            n_trials: 10_000,
            beta: 0.5,
            boost_axis: [1.0, 0.0, 0.0],
            output_dir: "out".into(),
            parallel: true,
            mass: 1.0,
            decay_k0: 1.0,
            decay_width: 0.05,
            decay_samples: 201,
            detector_distances: [1.0, 1.0],
            detector_half_angle_deg: 20.0,
            angle_a_deg: 0.0,
            angle_a2_deg: 90.0,
            angle_b_deg: 45.0,
            angle_b2_deg: 135.0,
            detector_separation: 2.0,
            screen_rings: 4,
            screen_sectors: 8,
            screen_profile: ScreenProfile::Isotropic,
            screen_cosine_power: 1,
            packet_center: 0.3,
            packet_sigma: 0.1,
            grid_samples: 2048,
            grid_k_max: 4.5,
            policy: "instantaneous-born".into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {guard}")]
    Validation { field: &'static str, guard: String },
    #[error("config serialize error: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn guard(field: &'static str, guard: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field, guard: guard.into() }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if !table.contains_key("scenario") {
        return Err(ConfigError::Parse("missing required key `scenario`".into()));
    }
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}

pub fn serialize_config(config: &RunConfig) -> Result<String, ConfigError> {
    Ok(toml::to_string(config)?)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.beta.abs() < BETA_LIMIT) {
            return Err(guard("beta", format!("|beta| < 1 required, got {}", self.beta)));
        }
        if !self.boost_axis.iter().all(|c| c.is_finite()) || norm3(self.boost_axis) == 0.0 {
            return Err(guard("boost_axis", "must be a finite nonzero vector"));
        }
        if self.n_trials == 0 {
            return Err(guard("n_trials", "must be >= 1"));
        }
        if self.scenario == ScenarioId::EprBoosted && self.n_trials < crate::epr::MIN_TRIALS {
            return Err(guard("n_trials", format!("epr_boosted needs n_trials >= {}", crate::epr::MIN_TRIALS)));
        }
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(guard("mass", "must be finite and >= 0"));
        }
        if !(self.decay_k0 > 0.0 && self.decay_k0.is_finite()) {
            return Err(guard("decay_k0", "must be > 0"));
        }
        if !(self.decay_width > 0.0 && self.decay_width.is_finite()) {
            return Err(guard("decay_width", "must be > 0"));
        }
        if self.decay_samples < 2 {
            return Err(guard("decay_samples", "must be >= 2"));
        }
        if self.detector_distances.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(guard("detector_distances", "must be > 0"));
        }
        if !(self.detector_half_angle_deg > 0.0 && self.detector_half_angle_deg <= 90.0) {
            return Err(guard("detector_half_angle_deg", "must lie in (0, 90]"));
        }
        for (field, v) in [
            ("angle_a_deg", self.angle_a_deg),
            ("angle_a2_deg", self.angle_a2_deg),
            ("angle_b_deg", self.angle_b_deg),
            ("angle_b2_deg", self.angle_b2_deg),
        ] {
            if !v.is_finite() {
                return Err(guard(field, "must be finite"));
            }
        }
        if !(self.detector_separation >= 0.0 && self.detector_separation.is_finite()) {
            return Err(guard("detector_separation", "must be finite and >= 0"));
        }
        if self.screen_rings == 0 || self.screen_sectors == 0 {
            return Err(guard("screen_rings", "rings and sectors must be >= 1"));
        }
        if !(self.packet_sigma > 0.0 && self.packet_sigma.is_finite()) {
            return Err(guard("packet_sigma", "must be > 0"));
        }
        if !self.packet_center.is_finite() {
            return Err(guard("packet_center", "must be finite"));
        }
        if self.grid_samples < 16 {
            return Err(guard("grid_samples", "must be >= 16"));
        }
        if !(self.grid_k_max > 0.0 && self.grid_k_max.is_finite()) {
            return Err(guard("grid_k_max", "must be > 0"));
        }
        if crate::reduction::policy_by_id(&self.policy).is_none() {
            return Err(guard("policy", "must be instantaneous-born or pairwise-elimination"));
        }
        Ok(())
    }

    pub fn boost(&self) -> Result<BoostParameters, ConfigError> {
        BoostParameters::along(self.beta, self.boost_axis).map_err(|e| guard("beta", e.to_string()))
    }
}
