//! Run configuration, read from TOML with unit-suffixed keys.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cavity::SidebandPhases;
use crate::error::{Error, Result};
use crate::phonon::PhononParams;
use crate::steady_state::{CavityLosses, OperatingPoint, ThresholdModel};

const REFERENCE_TOML: &str = include_str!("../configs/reference.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpoConfig {
    pub cavity: CavityConfig,
    pub operating_point: OperatingPointConfig,
    #[serde(default)]
    pub phonons: PhononConfig,
    #[serde(default)]
    pub detection: DetectionConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub fault_injection: FaultInjection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    /// Intensity reflectivity of the input coupler per carrier.
    pub coupler_reflectivity: [f64; 3],
    /// Intensity reflectivity of the end mirror per carrier.
    pub end_mirror_reflectivity: [f64; 3],
    pub fsr_hz: [f64; 3],
    #[serde(default)]
    pub detuning_rad_s: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPointConfig {
    /// Pump power in units of the threshold power.
    pub sigma: f64,
    pub omega_analysis_hz: f64,
    /// Informational only; the model works with `sigma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_power_mw: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default)]
    pub n_thermal: f64,
    #[serde(default)]
    pub coupling: [[f64; 3]; 3],
}

impl Default for PhononConfig {
    fn default() -> Self {
        Self { enabled: false, n_thermal: 0.0, coupling: [[0.0; 3]; 3] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "unit_efficiency")]
    pub efficiency: [f64; 3],
}

fn unit_efficiency() -> [f64; 3] {
    [1.0; 3]
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self { enabled: false, efficiency: unit_efficiency() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub threshold: ThresholdModel,
    #[serde(default)]
    pub sideband_phases: SidebandPhases,
}

/// Hooks that deliberately break the model, for negative controls.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultInjection {
    #[serde(default)]
    pub mirror_transmission_offset: f64,
}

impl OpoConfig {
    pub fn reference() -> Self {
        Self::from_toml_str(REFERENCE_TOML).expect("bundled reference config is valid")
    }

    pub fn reference_toml() -> &'static str {
        REFERENCE_TOML
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: OpoConfig = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = field_from_message(&message).unwrap_or_else(|| "<document>".to_string());
            Error::config(field, message)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.cavity;
        for n in 0..3 {
            check_unit_interval(c.coupler_reflectivity[n], &format!("cavity.coupler_reflectivity[{n}]"))?;
            check_unit_interval(c.end_mirror_reflectivity[n], &format!("cavity.end_mirror_reflectivity[{n}]"))?;
            if !(c.fsr_hz[n].is_finite() && c.fsr_hz[n] > 0.0) {
                return Err(Error::config(format!("cavity.fsr_hz[{n}]"), "must be finite and > 0"));
            }
            if !c.detuning_rad_s[n].is_finite() {
                return Err(Error::config(format!("cavity.detuning_rad_s[{n}]"), "must be finite"));
            }
            if self.detection.enabled || self.detection.efficiency[n] != 1.0 {
                check_unit_interval(self.detection.efficiency[n], &format!("detection.efficiency[{n}]"))?;
            }
        }
        let op = &self.operating_point;
        if !(op.sigma.is_finite() && op.sigma >= 0.0) {
            return Err(Error::config("operating_point.sigma", "must be finite and >= 0"));
        }
        if !(op.omega_analysis_hz.is_finite() && op.omega_analysis_hz >= 0.0) {
            return Err(Error::config("operating_point.omega_analysis_hz", "must be finite and >= 0"));
        }
        if let Some(p) = op.threshold_power_mw {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::config("operating_point.threshold_power_mw", "must be finite and > 0"));
            }
        }
        self.phonon_params(1.0).validate()?;
        if !self.fault_injection.mirror_transmission_offset.is_finite() {
            return Err(Error::config("fault_injection.mirror_transmission_offset", "must be finite"));
        }
        self.operating_point().validate()
    }

    pub fn losses(&self) -> Result<CavityLosses> {
        CavityLosses::from_reflectivities(self.cavity.coupler_reflectivity, self.cavity.end_mirror_reflectivity)
    }

    pub fn operating_point(&self) -> OperatingPoint {
        OperatingPoint {
            sigma: self.operating_point.sigma,
            analysis_frequency_hz: self.operating_point.omega_analysis_hz,
            detuning_rad_s: self.cavity.detuning_rad_s,
            fsr_hz: self.cavity.fsr_hz,
        }
    }

    pub fn phonon_params(&self, amplitude_reference: f64) -> PhononParams {
        PhononParams { coupling: self.phonons.coupling, n_thermal: self.phonons.n_thermal, amplitude_reference }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.operating_point.sigma = sigma;
        self
    }

    pub fn with_omega_hz(mut self, hz: f64) -> Self {
        self.operating_point.omega_analysis_hz = hz;
        self
    }

    pub fn with_phonons(mut self, enabled: bool) -> Self {
        self.phonons.enabled = enabled;
        self
    }

    pub fn with_detection(mut self, enabled: bool) -> Self {
        self.detection.enabled = enabled;
        self
    }
}

fn check_unit_interval(x: f64, field: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("{x} is outside (0, 1]")))
    }
}

fn field_from_message(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}
