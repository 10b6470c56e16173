//! Run configuration: a TOML document with `[scenario]`, `[model]`, `[qaoa]`
//! and `[validator]` sections. Every key is optional and falls back to the
//! documented default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingModelSpec, ModelId, DEFAULT_ALPHA, DEFAULT_CUTOFF_PITCHES};
use crate::error::{Error, Result};
use crate::geometry::{Direction, ScenarioConfig};
use crate::qaoa::OptimizerConfig;
use crate::validator::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub frequency_hz: f64,
    pub element_spacing_m: f64,
    pub rows: usize,
    pub cols: usize,
    pub incident_theta_deg: f64,
    pub incident_phi_deg: f64,
    pub target_theta_deg: f64,
    pub target_phi_deg: f64,
}

impl From<&ScenarioConfig> for ScenarioSection {
    fn from(s: &ScenarioConfig) -> Self {
        Self {
            frequency_hz: s.frequency_hz,
            element_spacing_m: s.element_spacing_m,
            rows: s.rows,
            cols: s.cols,
            incident_theta_deg: s.incident.theta_deg,
            incident_phi_deg: s.incident.phi_deg,
            target_theta_deg: s.target.theta_deg,
            target_phi_deg: s.target.phi_deg,
        }
    }
}

impl From<&ScenarioSection> for ScenarioConfig {
    fn from(s: &ScenarioSection) -> Self {
        Self {
            frequency_hz: s.frequency_hz,
            element_spacing_m: s.element_spacing_m,
            rows: s.rows,
            cols: s.cols,
            incident: Direction::new(s.incident_theta_deg, s.incident_phi_deg),
            target: Direction::new(s.target_theta_deg, s.target_phi_deg),
        }
    }
}

impl Default for ScenarioSection {
    fn default() -> Self {
        (&ScenarioConfig::default()).into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// 1 ideal phase, 2 distance penalty, 3 spherical wave, 4 far field.
    pub model: ModelId,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverse_distance_scale: Option<f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            model: ModelId::FarField,
            alpha: DEFAULT_ALPHA,
            cutoff_m: None,
            inverse_distance_scale: None,
        }
    }
}

impl ModelSection {
    pub fn spec(&self) -> CouplingModelSpec {
        self.spec_for(self.model)
    }

    /// Same parameters, different model.
    pub fn spec_for(&self, model: ModelId) -> CouplingModelSpec {
        CouplingModelSpec {
            model,
            cutoff_m: self.cutoff_m,
            alpha: self.alpha,
            inverse_distance_scale: self.inverse_distance_scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidatorSection {
    /// Coupling strength of the validation model; `None` reuses `model.alpha`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub theta_step_deg: f64,
    pub phi_step_deg: f64,
    pub element_exponent: f64,
}

impl Default for ValidatorSection {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            alpha: None,
            theta_step_deg: g.theta_step_deg,
            phi_step_deg: g.phi_step_deg,
            element_exponent: g.element_exponent,
        }
    }
}

impl ValidatorSection {
    pub fn grid(&self) -> GridSpec {
        GridSpec {
            theta_step_deg: self.theta_step_deg,
            phi_step_deg: self.phi_step_deg,
            element_exponent: self.element_exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    pub model: ModelSection,
    pub qaoa: OptimizerConfig,
    pub validator: ValidatorSection,
}

impl RunConfig {
    pub fn scenario(&self) -> ScenarioConfig {
        (&self.scenario).into()
    }

    pub fn validation_alpha(&self) -> f64 {
        self.validator.alpha.unwrap_or(self.model.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario().validate().map_err(|e| match e {
            // nested direction fields are flat keys in the document
            Error::Config { field, message } => Error::Config {
                field: field
                    .replace("scenario.incident.", "scenario.incident_")
                    .replace("scenario.target.", "scenario.target_"),
                message,
            },
            other => other,
        })?;
        self.model.spec().validate()?;
        self.qaoa.validate()?;
        self.validator.grid().validate()?;
        if let Some(a) = self.validator.alpha {
            if !a.is_finite() {
                return Err(Error::config("validator.alpha", "must be finite"));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| key_at(text, s.start)).unwrap_or_else(|| "config".into());
            Error::Config { field, message: e.message().trim().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }
}

/// `section.key` for the line containing byte `offset`.
fn key_at(text: &str, offset: usize) -> String {
    let offset = offset.min(text.len());
    let line_start = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next().unwrap_or("");
    let section = text[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('[') && l.ends_with(']'))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
    let key = line.split('=').next().unwrap_or("").trim();
    let key = if key.starts_with('[') || key.is_empty() { None } else { Some(key.to_string()) };
    match (section, key) {
        (Some(s), Some(k)) => format!("{s}.{k}"),
        (Some(s), None) => s,
        (None, Some(k)) => k,
        (None, None) => "config".into(),
    }
}

/// Commented default configuration, as printed by `--print-defaults`.
pub fn render_defaults() -> String {
    let s = ScenarioSection::default();
    let m = ModelSection::default();
    let q = OptimizerConfig::default();
    let v = ValidatorSection::default();
    format!(
        r#"# Bitstrings: character i is element i (row-major, i = row * cols + col);
# bit 1 means a pi phase shift. Angles are in degrees.

[scenario]
frequency_hz = {:?}
element_spacing_m = {:?}
rows = {}
cols = {}
incident_theta_deg = {:?}
incident_phi_deg = {:?}
target_theta_deg = {:?}
target_phi_deg = {:?}

[model]
# 1 ideal phase, 2 distance penalty, 3 spherical wave, 4 far field
model = {}
# mutual-coupling strength (models 3, 4)
alpha = {:?}
# interaction cutoff in meters (models 2, 3); default {} x element spacing
# cutoff_m = 6.0e-3
# numerator of the model-2 1/d penalty; default is the wavenumber
# inverse_distance_scale = 628.3

[qaoa]
depth = {}
steps = {}
learning_rate = {:?}
adam_beta1 = {:?}
adam_beta2 = {:?}
adam_epsilon = {:?}
restarts = {}
init_noise_sigma = {:?}
gamma_max = {:?}
beta_max = {:?}
seed = {}
max_qubits = {}

[validator]
# coupling strength of the validation model; defaults to model.alpha
# alpha = 0.2
theta_step_deg = {:?}
phi_step_deg = {:?}
# exponent m of the cos^m(theta) element pattern
element_exponent = {:?}
"#,
        s.frequency_hz,
        s.element_spacing_m,
        s.rows,
        s.cols,
        s.incident_theta_deg,
        s.incident_phi_deg,
        s.target_theta_deg,
        s.target_phi_deg,
        m.model.number(),
        m.alpha,
        DEFAULT_CUTOFF_PITCHES,
        q.depth,
        q.steps,
        q.learning_rate,
        q.adam_beta1,
        q.adam_beta2,
        q.adam_epsilon,
        q.restarts,
        q.init_noise_sigma,
        q.gamma_max,
        q.beta_max,
        q.seed,
        q.max_qubits,
        v.theta_step_deg,
        v.phi_step_deg,
        v.element_exponent,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_all_defaults() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn rendered_defaults_parse_back() {
        assert_eq!(RunConfig::from_toml_str(&render_defaults()).unwrap(), RunConfig::default());
    }

    #[test]
    fn serialized_config_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.scenario.rows = 3;
        cfg.model.cutoff_m = Some(7e-3);
        cfg.validator.alpha = Some(0.0);
        cfg.qaoa.seed = 99;
        assert_eq!(RunConfig::from_toml_str(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn partial_sections_override() {
        let cfg = RunConfig::from_toml_str("[scenario]\nrows = 3\ncols = 3\n[model]\nmodel = 2\n").unwrap();
        assert_eq!(cfg.scenario().element_count(), 9);
        assert_eq!(cfg.model.model, ModelId::DistancePenalty);
        assert_eq!(cfg.qaoa, OptimizerConfig::default());
        assert_eq!(cfg.validation_alpha(), DEFAULT_ALPHA);
    }

    fn field_of(text: &str) -> String {
        match RunConfig::from_toml_str(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(field_of("[scenario]\nrows = \"five\"\n"), "scenario.rows");
        assert_eq!(field_of("[qaoa]\ndepth = 3\nbogus = 1\n"), "qaoa.bogus");
        assert_eq!(field_of("[model]\nmodel = 7\n"), "model.model");
        assert_eq!(field_of("[scenario]\nrows = 0\n"), "scenario.rows");
        assert_eq!(field_of("[scenario]\ntarget_theta_deg = 95.0\n"), "scenario.target_theta_deg");
        assert_eq!(field_of("[qaoa]\nlearning_rate = -1.0\n"), "qaoa.learning_rate");
        assert_eq!(field_of("[validator]\ntheta_step_deg = 0.0\n"), "validator.theta_step_deg");
        assert_eq!(field_of("[model]\nalpha = -0.5\n"), "model.alpha");
    }
}
