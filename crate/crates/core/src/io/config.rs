use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::CHECK_NAMES;
use crate::error::{DyadicError, Result};
use crate::integrate::{Scheme, StepControls};
use crate::model::{ModelParams, Tail};
use crate::scenarios::Scenario;

/// Everything needed to reproduce one run.
///
/// On disk this is TOML with four sections:
///
/// ```toml
/// [model]
/// alpha = 0.3
/// trunc_k = 12
/// # norm_s = 1.5, tail = "plateau", nonlinear = true
///
/// [controls]            # optional; every key optional
/// rel_tol = 1e-9
/// scheme = "duhamel_imex"
///
/// [scenario]
/// kind = "front"
/// k0 = 5
/// q = 1.35
/// r = 0.5
///
/// [run]
/// t_end = 1.0
/// # delta = 0.5, checks = ["monotone"], output_prefix = "out/run"
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// `params.delta` carries the `[run] delta` value.
    pub params: ModelParams,
    pub controls: StepControls,
    pub scenario: Scenario,
    pub t_end: f64,
    pub checks: Vec<String>,
    pub output_prefix: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawConfig {
    pub model: RawModel,
    #[serde(default)]
    pub controls: RawControls,
    pub scenario: Scenario,
    pub run: RawRun,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawModel {
    pub alpha: f64,
    pub trunc_k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Tail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinear: Option<bool>,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawControls {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escape_factor: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawRun {
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_prefix: Option<String>,
}

const DEFAULT_PREFIX: &str = "dyadic_run";

impl RawConfig {
    pub(crate) fn resolve(self) -> Result<RunConfig> {
        let m = self.model;
        let params = ModelParams {
            alpha: m.alpha,
            trunc_k: m.trunc_k,
            norm_s: m.norm_s.unwrap_or(ModelParams::DEFAULT_NORM_S),
            tail: m.tail.unwrap_or_default(),
            nonlinear: m.nonlinear.unwrap_or(true),
            delta: self.run.delta.unwrap_or(ModelParams::DEFAULT_DELTA),
        };
        params.validate()?;
        let c = self.controls;
        let mut controls = StepControls::default_for(&params);
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = c.$f { controls.$f = v; } )* };
        }
        set!(rel_tol, abs_tol, dt_init, dt_min, max_steps, scheme, record_every, escape_factor);
        controls.validate()?;
        if !(self.run.t_end > 0.0 && self.run.t_end.is_finite()) {
            return Err(DyadicError::Config(format!("t_end must be > 0, got {}", self.run.t_end)));
        }
        self.scenario.build(params.trunc_k)?;
        for name in &self.run.checks {
            if !CHECK_NAMES.contains(&name.as_str()) {
                return Err(DyadicError::Config(format!(
                    "unknown check `{name}` (expected one of {})",
                    CHECK_NAMES.join(", ")
                )));
            }
        }
        Ok(RunConfig {
            params,
            controls,
            scenario: self.scenario,
            t_end: self.run.t_end,
            checks: self.run.checks,
            output_prefix: self.run.output_prefix.unwrap_or_else(|| DEFAULT_PREFIX.to_string()),
        })
    }
}

impl RunConfig {
    pub fn new(params: ModelParams, scenario: Scenario, t_end: f64) -> Result<Self> {
        let raw = RawConfig {
            model: RawModel {
                alpha: params.alpha,
                trunc_k: params.trunc_k,
                norm_s: Some(params.norm_s),
                tail: Some(params.tail),
                nonlinear: Some(params.nonlinear),
            },
            controls: RawControls::default(),
            scenario,
            run: RawRun {
                t_end,
                delta: Some(params.delta),
                checks: Vec::new(),
                output_prefix: None,
            },
        };
        raw.resolve()
    }

    pub(crate) fn to_raw(&self) -> RawConfig {
        let c = &self.controls;
        RawConfig {
            model: RawModel {
                alpha: self.params.alpha,
                trunc_k: self.params.trunc_k,
                norm_s: Some(self.params.norm_s),
                tail: Some(self.params.tail),
                nonlinear: Some(self.params.nonlinear),
            },
            controls: RawControls {
                rel_tol: Some(c.rel_tol),
                abs_tol: Some(c.abs_tol),
                dt_init: Some(c.dt_init),
                dt_min: Some(c.dt_min),
                max_steps: Some(c.max_steps),
                scheme: Some(c.scheme),
                record_every: Some(c.record_every),
                escape_factor: Some(c.escape_factor),
            },
            scenario: self.scenario.clone(),
            run: RawRun {
                t_end: self.t_end,
                delta: Some(self.params.delta),
                checks: self.checks.clone(),
                output_prefix: Some(self.output_prefix.clone()),
            },
        }
    }

    /// Fully populated TOML; `parse_config(&cfg.to_toml())` reproduces `cfg`.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("configuration serialises")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        super::write_atomic(path, &self.to_toml())
    }
}

/// Parses configuration text; `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| DyadicError::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    raw.resolve()
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string())
}
