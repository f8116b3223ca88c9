//! Scenario files: one TOML document fully determines a run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::lab::{presets, LabError, LabResult};
use crate::model::{ControllerConfig, DisturbanceSchedule, PlatoonState, Topology};
use crate::sim::{IntegratorSettings, Method, MonitorToggles, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Vehicle count.
    pub n: usize,
    pub topology: Topology,
    pub controller: ControllerConfig,
    /// Free spacings `s_2..s_n` and speeds `v_1..v_n`; on a ring the closing
    /// gap `s_1` follows from the length.
    pub initial: PlatoonState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<DisturbanceSchedule>,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub monitors: MonitorToggles,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Free-form provenance of derived numbers, e.g. `q = "lambda^-3"`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

/// Pass criteria checked by `verify`. Absent entries are not checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Fail when any applicable monitor reports a violation.
    pub monitors: bool,
    /// Final `max_i |v_i - v*|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed_tol: Option<f64>,
    /// Final `max_i |s_i - spacing_target|`, closing gap included.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing_tol: Option<f64>,
    /// Final smallest gap must be at least this.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_final_spacing: Option<f64>,
    /// Final `H` must be at most this.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_final_lyapunov: Option<f64>,
    /// Fitted tail slope of `ln U` (or `ln H` without `U`) must be at most this.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_decay_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_r_squared: Option<f64>,
    pub decay_tail_fraction: f64,
    /// Samples from the first value at or below this floor on are not fitted.
    pub decay_floor: f64,
    /// Distance to the equilibrium set must stay below `convergence_tol`
    /// from this time on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_time: Option<f64>,
    pub convergence_tol: f64,
    /// Followers stay below the disturbance amplitude and peaks decay along
    /// both propagation directions.
    pub string_attenuation: bool,
    /// Peak `|F_i|` must be strictly below that of the named preset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_accel_below_preset: Option<String>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            monitors: true,
            speed_tol: None,
            spacing_target: None,
            spacing_tol: None,
            min_final_spacing: None,
            max_final_lyapunov: None,
            max_decay_slope: None,
            min_r_squared: None,
            decay_tail_fraction: 0.5,
            decay_floor: 1e-12,
            convergence_time: None,
            convergence_tol: 1e-3,
            string_attenuation: false,
            max_accel_below_preset: None,
        }
    }
}

/// Command-line adjustments applied on top of a scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub sample_stride: Option<f64>,
    pub t_end: Option<f64>,
    pub method: Option<Method>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, scenario: &mut Scenario) {
        let s = &mut scenario.integrator;
        if let Some(x) = self.sample_stride {
            s.sample_stride = x;
        }
        if let Some(x) = self.t_end {
            s.t_end = x;
        }
        if let Some(x) = self.method {
            s.method = x;
        }
        if let Some(x) = self.rtol {
            s.rtol = x;
        }
        if let Some(x) = self.atol {
            s.atol = x;
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> LabResult<Self> {
        let scenario: Scenario = toml::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> LabResult<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: &Path) -> LabResult<()> {
        std::fs::write(path, self.to_toml()?).map_err(|e| LabError::io(path, e))
    }

    /// Hex SHA-256 of the emitted TOML.
    pub fn hash(&self) -> LabResult<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    /// Checks every invariant before a run; the message names the first one violated.
    pub fn validate(&self) -> LabResult<()> {
        if self.name.trim().is_empty() {
            return Err(LabError::Invalid("scenario name is empty".into()));
        }
        if self.initial.n() != self.n {
            return Err(LabError::Invalid(format!(
                "n = {} but the initial state has {} speeds",
                self.n,
                self.initial.n()
            )));
        }
        let t = &self.thresholds;
        if t.spacing_target.is_some() != t.spacing_tol.is_some() {
            return Err(LabError::Invalid(
                "spacing_target and spacing_tol must be given together".into(),
            ));
        }
        if t.string_attenuation && self.disturbance.is_none() {
            return Err(LabError::Invalid(
                "string_attenuation threshold needs a [disturbance] section".into(),
            ));
        }
        if let Some(name) = &t.max_accel_below_preset {
            if !presets::PRESET_NAMES.contains(&name.as_str()) {
                return Err(LabError::Invalid(format!(
                    "max_accel_below_preset names unknown preset {name:?}"
                )));
            }
        }
        self.problem().validate()?;
        Ok(())
    }

    pub fn problem(&self) -> Problem {
        Problem {
            topology: self.topology,
            controller: self.controller,
            initial: self.initial.clone(),
            disturbance: self.disturbance,
            settings: self.integrator,
        }
    }
}

/// A scenario file path, or else a preset name.
pub fn load_scenario(source: &str) -> LabResult<Scenario> {
    let path = Path::new(source);
    if path.is_file() {
        return Scenario::load(path);
    }
    presets::preset(source).map_err(|_| LabError::UnknownSource {
        name: source.to_string(),
        available: presets::PRESET_NAMES.join(", "),
    })
}
