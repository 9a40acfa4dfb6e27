//! Run configuration: the JSON document accepted by every subcommand.

use serde::{Deserialize, Serialize};
use spinbath_core::model::{CouplingDistribution, InverseTemperature, SamplerSpec, SpinState};
use spinbath_core::oracle::ORACLE_MAX_MODES;
use spinbath_core::trajectory::{uniform_grid, validate_grid};
use spinbath_core::{Engine, Mode, Model};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_engines")]
    pub engines: Vec<Engine>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary: Option<StationaryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_engines() -> Vec<Engine> {
    vec![Engine::ConfigSum]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub delta: f64,
    #[serde(default)]
    pub beta: f64,
    /// Overrides `beta` with `β = ∞`.
    #[serde(default)]
    pub zero_temperature: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<ModeConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    #[serde(default)]
    pub initial_state: InitialState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub omega: f64,
    pub g: f64,
}

/// Random couplings; the seed is the top-level `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub count: usize,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "one")]
    pub c_total: f64,
    #[serde(default = "gaussian")]
    pub distribution: CouplingDistribution,
}

fn one() -> f64 {
    1.0
}

fn gaussian() -> CouplingDistribution {
    CouplingDistribution::Gaussian
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedState {
    Excited,
    Ground,
}

/// `"excited"`, `"ground"` or `{"theta": .., "phi": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(NamedState),
    Angles { theta: f64, phi: f64 },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named(NamedState::Excited)
    }
}

impl InitialState {
    pub fn spin_state(&self) -> SpinState<f64> {
        match *self {
            InitialState::Named(NamedState::Excited) => SpinState::excited(),
            InitialState::Named(NamedState::Ground) => SpinState::ground(),
            InitialState::Angles { theta, phi } => SpinState { theta, phi },
        }
    }
}

/// Either `t_max` with `steps` or an explicit `times` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            t_max: Some(10.0),
            steps: Some(200),
            times: None,
        }
    }
}

impl GridConfig {
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        let times = match (&self.times, self.t_max, self.steps) {
            (Some(ts), None, None) => ts.clone(),
            (None, Some(t_max), Some(steps)) => {
                if t_max < 0.0 || !t_max.is_finite() {
                    return Err(CliError::config("grid.t_max", "must be finite and non-negative"));
                }
                uniform_grid(t_max, steps)
            }
            (None, Some(_), None) => return Err(CliError::config("grid.steps", "required with t_max")),
            (None, None, Some(_)) => return Err(CliError::config("grid.t_max", "required with steps")),
            _ => {
                return Err(CliError::config(
                    "grid",
                    "give either t_max and steps or an explicit times list",
                ))
            }
        };
        validate_grid(&times).map_err(|e| CliError::config("grid", e.to_string()))?;
        Ok(times)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_subdivisions")]
    pub max_subdivisions: usize,
    /// Tolerance of the outer integral; `100 abs_tol` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_abs_tol: Option<f64>,
}

fn default_abs_tol() -> f64 {
    1e-10
}

fn default_rel_tol() -> f64 {
    1e-9
}

fn default_subdivisions() -> usize {
    2000
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: default_abs_tol(),
            rel_tol: default_rel_tol(),
            max_subdivisions: default_subdivisions(),
            outer_abs_tol: None,
        }
    }
}

impl QuadratureConfig {
    pub fn settings(&self) -> Result<spinbath_core::closed_form::IntegralSettings<f64>, CliError> {
        let mut s = spinbath_core::closed_form::IntegralSettings::from_abs_tol(self.abs_tol);
        s.inner.rel_tol = self.rel_tol;
        s.inner.max_subdivisions = self.max_subdivisions;
        if let Some(outer) = self.outer_abs_tol {
            s.outer_abs_tol = outer;
        }
        s.validate().map_err(|e| CliError::config("quadrature", e.to_string()))?;
        Ok(s)
    }
}

/// File names, resolved against `--out-dir`. Defaults depend on the subcommand.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
}

/// Averaging window; defaults to `[100/σ, 200/σ]` with `10^4` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    10_000
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self {
            t_start: None,
            t_end: None,
            samples: default_samples(),
        }
    }
}

/// Empty lists fall back to the model's own value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub delta: Vec<f64>,
    #[serde(default)]
    pub c_total: Vec<f64>,
    #[serde(default)]
    pub beta: Vec<f64>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
        field: "config".into(),
        reason: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.engines.is_empty() {
            return Err(CliError::config("engines", "at least one engine is required"));
        }
        let mut seen = self.engines.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.engines.len() {
            return Err(CliError::config("engines", "duplicate engine"));
        }
        let m = &self.model;
        if !m.delta.is_finite() {
            return Err(CliError::config("model.delta", "must be finite"));
        }
        if m.beta < 0.0 || !m.beta.is_finite() {
            return Err(CliError::config("model.beta", "must be finite and non-negative"));
        }
        if m.modes.is_some() && m.sampler.is_some() {
            return Err(CliError::config("model", "give either modes or sampler, not both"));
        }
        let n = self.mode_count();
        if self.engines.contains(&Engine::Oracle) && n > ORACLE_MAX_MODES {
            return Err(CliError::config(
                "engines",
                format!("oracle supports at most {ORACLE_MAX_MODES} bath modes, the model has {n}"),
            ));
        }
        self.grid.times()?;
        self.quadrature.settings()?;
        if let Some(s) = &self.stationary {
            if s.samples == 0 {
                return Err(CliError::config("stationary.samples", "must be positive"));
            }
        }
        self.build_model()?;
        Ok(())
    }

    pub fn mode_count(&self) -> usize {
        match (&self.model.modes, &self.model.sampler) {
            (Some(modes), _) => modes.len(),
            (None, Some(s)) => s.count,
            (None, None) => 0,
        }
    }

    pub fn beta(&self) -> InverseTemperature<f64> {
        if self.model.zero_temperature {
            InverseTemperature::Infinite
        } else {
            InverseTemperature::Finite(self.model.beta)
        }
    }

    pub fn sampler_spec(&self) -> Option<SamplerSpec<f64>> {
        self.model.sampler.map(|s| SamplerSpec {
            count: s.count,
            omega: s.omega,
            c_total: s.c_total,
            distribution: s.distribution,
            seed: self.seed,
        })
    }

    pub fn build_model(&self) -> Result<Model, CliError> {
        let modes = match (&self.model.modes, self.sampler_spec()) {
            (Some(modes), _) => modes.iter().map(|m| Mode::new(m.omega, m.g)).collect(),
            (None, Some(s)) => s.sample_couplings().map_err(|e| CliError::config("model.sampler", e.to_string()))?,
            (None, None) => Vec::new(),
        };
        Model::new(self.model.delta, self.beta(), modes)
            .and_then(|m| m.with_initial_state(self.model.initial_state.spin_state()))
            .map_err(|e| CliError::config("model", e.to_string()))
    }

    /// Gaussian-limit parameters `(C, ω)`. Explicit modes are folded into
    /// `C = Σ g² / cosh²(β ω_k)` with `ω = 0`, which gives the same variance.
    pub fn gaussian_parameters(&self) -> Result<(f64, f64), CliError> {
        if let Some(s) = self.model.sampler {
            return Ok((s.c_total, s.omega));
        }
        let model = self.build_model()?;
        let beta = self.beta();
        let c = model
            .modes()
            .iter()
            .map(|m| m.coupling * m.coupling / beta.cosh2_beta_omega(m.omega))
            .sum();
        Ok((c, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_takes_defaults() {
        let c = parse_config(r#"{"model": {"delta": 1.0}}"#).unwrap();
        assert_eq!(c.model.beta, 0.0);
        assert_eq!(c.engines, vec![Engine::ConfigSum]);
        assert_eq!(c.seed, 0);
        assert_eq!(c.grid.times().unwrap().len(), 201);
        assert_eq!(c.model.initial_state, InitialState::default());
    }

    #[test]
    fn missing_delta_is_named() {
        let e = parse_config(r#"{"model": {"beta": 1.0}}"#).unwrap_err();
        assert!(e.to_string().contains("delta"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config(r#"{"model": {"delta": 1.0, "gamma": 2}}"#).is_err());
        assert!(parse_config(r#"{"model": {"delta": 1.0}, "extra": 0}"#).is_err());
    }

    #[test]
    fn oracle_cap_enforced() {
        let e = parse_config(r#"{"model": {"delta": 1.0, "sampler": {"count": 16}}, "engines": ["oracle", "configsum"]}"#)
            .unwrap_err();
        assert!(e.to_string().contains("at most 10"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn grid_forms() {
        let c = parse_config(r#"{"model": {"delta": 1.0}, "grid": {"times": [0, 0.5, 2]}}"#).unwrap();
        assert_eq!(c.grid.times().unwrap(), vec![0.0, 0.5, 2.0]);
        assert!(parse_config(r#"{"model": {"delta": 1.0}, "grid": {"times": [1, 0]}}"#).is_err());
        assert!(parse_config(r#"{"model": {"delta": 1.0}, "grid": {"t_max": 1}}"#).is_err());
        assert!(parse_config(r#"{"model": {"delta": 1.0}, "grid": {"times": []}}"#).is_err());
    }

    #[test]
    fn initial_state_forms() {
        let c = parse_config(r#"{"model": {"delta": 1.0, "initial_state": "ground"}}"#).unwrap();
        assert_eq!(c.build_model().unwrap().initial_state(), SpinState::ground());
        let c = parse_config(r#"{"model": {"delta": 1.0, "initial_state": {"theta": 0.5, "phi": 1.0}}}"#).unwrap();
        assert_eq!(c.build_model().unwrap().initial_state().theta, 0.5);
    }

    #[test]
    fn serialization_round_trips() {
        let text = r#"{"model": {"delta": 1.5, "beta": 0.5, "sampler": {"count": 4, "distribution": "rademacher"}},
                       "engines": ["oracle", "integral"], "seed": 9, "stationary": {}}"#;
        let c = parse_config(text).unwrap();
        let again = parse_config(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.build_model().unwrap(), again.build_model().unwrap());
    }

    #[test]
    fn gaussian_parameters_from_modes() {
        let c = parse_config(r#"{"model": {"delta": 1.0, "beta": 1.0, "modes": [{"omega": 1, "g": 2}, {"omega": 0, "g": 1}]}}"#)
            .unwrap();
        let (ct, w) = c.gaussian_parameters().unwrap();
        assert_eq!(w, 0.0);
        assert!((ct - (4.0 / 1f64.cosh().powi(2) + 1.0)).abs() < 1e-14);
    }
}
