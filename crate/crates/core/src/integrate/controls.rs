use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Dormand-Prince 5(4) with PI step control.
    ExplicitAdaptive,
    /// Integrating-factor (Lawson) RK4 in slope variables: `e^{-tL}` applied
    /// exactly, transport term explicit, step doubling for error control.
    DuhamelImex,
    /// Classical RK4 at the fixed step `dt_init`.
    ReferenceFixedRk4,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ExplicitAdaptive => "explicit_adaptive",
            Self::DuhamelImex => "duhamel_imex",
            Self::ReferenceFixedRk4 => "reference_fixed_rk4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControls {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub max_steps: u64,
    pub scheme: Scheme,
    /// Output cadence in simulated time.
    pub record_every: f64,
    /// A run stops with an escape once `||a||_{X^s}` exceeds this multiple of
    /// its initial value.
    pub escape_factor: f64,
}

impl StepControls {
    pub const DEFAULT_ESCAPE_FACTOR: f64 = 1e6;

    /// Defaults for a model: the integrating-factor scheme when `alpha > 0`,
    /// the explicit pair otherwise.
    pub fn default_for(params: &ModelParams) -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            dt_init: 1e-4,
            dt_min: 1e-14,
            max_steps: 20_000_000,
            scheme: if params.is_inviscid() {
                Scheme::ExplicitAdaptive
            } else {
                Scheme::DuhamelImex
            },
            record_every: 1e-2,
            escape_factor: Self::DEFAULT_ESCAPE_FACTOR,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_record_every(mut self, record_every: f64) -> Self {
        self.record_every = record_every;
        self
    }

    pub fn with_dt_init(mut self, dt: f64) -> Self {
        self.dt_init = dt;
        self
    }

    pub fn with_escape_factor(mut self, factor: f64) -> Self {
        self.escape_factor = factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(DyadicError::Domain(format!("{what} must be > 0, got {v}")))
        };
        if !(self.rel_tol > 0.0) {
            return bad("rel_tol", self.rel_tol);
        }
        if !(self.abs_tol > 0.0) {
            return bad("abs_tol", self.abs_tol);
        }
        if !(self.dt_min > 0.0) {
            return bad("dt_min", self.dt_min);
        }
        if !(self.record_every > 0.0) {
            return bad("record_every", self.record_every);
        }
        if !(self.escape_factor > 0.0) {
            return bad("escape_factor", self.escape_factor);
        }
        if !(self.dt_min < self.dt_init) {
            return Err(DyadicError::Domain(format!(
                "dt_min ({}) must be below dt_init ({})",
                self.dt_min, self.dt_init
            )));
        }
        if self.max_steps == 0 {
            return Err(DyadicError::Domain("max_steps must be > 0".into()));
        }
        Ok(())
    }
}
