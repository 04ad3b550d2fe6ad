use serde::{Deserialize, Serialize};

use super::controls::StepControls;
use super::stepper::Integrator;
use crate::analysis::{front_index, holder_seminorm, j_functional, slope_ratio_report, MONOTONE_TOL};
use crate::error::{DyadicError, Result};
use crate::model::{xs_norm, DyadicState, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedTEnd,
    EscapeDetected,
    StepUnderflow,
    /// The step budget ran out; the trajectory is partial.
    MaxStepsExceeded,
    /// Admissible data lost monotonicity beyond tolerance, which signals
    /// integrator failure rather than model behaviour.
    MonotonicityLost,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ReachedTEnd => "reached_t_end",
            Self::EscapeDetected => "escape_detected",
            Self::StepUnderflow => "step_underflow",
            Self::MaxStepsExceeded => "max_steps_exceeded",
            Self::MonotonicityLost => "monotonicity_lost",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Self::ReachedTEnd,
            Self::EscapeDetected,
            Self::StepUnderflow,
            Self::MaxStepsExceeded,
            Self::MonotonicityLost,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
    }
}

/// Per-sample diagnostics, a pure function of the snapshot and the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub a0: f64,
    pub sup_a: f64,
    /// `||a||_{X^s}` at the model's `norm_s`.
    pub xs_norm: f64,
    /// `J` at the model's `delta`.
    pub j: f64,
    /// Largest resolved `b_k / b_{k-1}`, if any pair is resolved.
    pub max_ratio: Option<f64>,
    pub front_index: Option<usize>,
    pub holder_half: f64,
}

impl Diagnostics {
    pub fn compute(params: &ModelParams, state: &DyadicState) -> Self {
        Self {
            a0: state.values()[0],
            sup_a: state.sup(),
            xs_norm: xs_norm(state, params.norm_s),
            j: j_functional(state, params.delta)
                .map(|j| j.value)
                .unwrap_or(f64::NAN),
            max_ratio: slope_ratio_report(state).max_ratio,
            front_index: front_index(state),
            holder_half: holder_seminorm(state, 0.5).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub state: DyadicState,
    pub diagnostics: Diagnostics,
}

impl Sample {
    pub fn new(params: &ModelParams, state: DyadicState) -> Self {
        let diagnostics = Diagnostics::compute(params, &state);
        Self { state, diagnostics }
    }

    pub fn t(&self) -> f64 {
        self.state.t
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub params: ModelParams,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub steps: u64,
    /// Context for abnormal terminations.
    pub message: Option<String>,
}

impl Trajectory {
    /// Wraps externally produced snapshots (diagnostics are recomputed).
    pub fn from_states(
        params: &ModelParams,
        states: Vec<DyadicState>,
        termination: Termination,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(DyadicError::InvalidInput("a trajectory needs at least one sample".into()));
        }
        for w in states.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(DyadicError::InvalidInput(format!(
                    "sample times must increase strictly ({} then {})",
                    w[0].t, w[1].t
                )));
            }
        }
        for s in &states {
            s.check_dim(params)?;
        }
        Ok(Self {
            params: *params,
            samples: states.into_iter().map(|s| Sample::new(params, s)).collect(),
            termination,
            steps: 0,
            message: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(Sample::t).collect()
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory is never empty")
    }

    /// `max_t ||a(t)||_{X^s}` over the samples, at the model's `norm_s`.
    pub fn max_xs_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.diagnostics.xs_norm)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean spacing between samples (0 for a single sample).
    pub fn mean_cadence(&self) -> f64 {
        if self.samples.len() < 2 {
            return 0.0;
        }
        (self.last().t() - self.first().t()) / (self.samples.len() - 1) as f64
    }
}

/// Integrates from `state0` to `t_end`, recording a sample every
/// `controls.record_every` (and at `t_end`).
///
/// Stops early on escape (`X^s` norm above `escape_factor` times its initial
/// value, or a non-finite state), step underflow, exhausted step budget, or
/// loss of monotonicity from admissible data. These are reported through
/// [`Trajectory::termination`]; `Err` is reserved for invalid input.
pub fn integrate(
    params: &ModelParams,
    state0: &DyadicState,
    t_end: f64,
    controls: &StepControls,
) -> Result<Trajectory> {
    params.validate()?;
    controls.validate()?;
    state0.check_dim(params)?;
    if !t_end.is_finite() || t_end < state0.t {
        return Err(DyadicError::Domain(format!(
            "t_end ({t_end}) must be finite and >= the initial time ({})",
            state0.t
        )));
    }
    let s = params.norm_s;
    let threshold = controls.escape_factor * xs_norm(state0, s);
    let admissible = state0.is_admissible();
    let mut traj = Trajectory {
        params: *params,
        samples: vec![Sample::new(params, state0.clone())],
        termination: Termination::ReachedTEnd,
        steps: 0,
        message: None,
    };
    let span = t_end - state0.t;
    if span == 0.0 {
        return Ok(traj);
    }

    let mut integ = Integrator::new(params, controls)?;
    let fixed = controls.scheme == super::Scheme::ReferenceFixedRk4;
    let n_rec = ((span / controls.record_every) * (1.0 - 1e-12)).ceil().max(1.0) as u64;
    let mut cur = state0.clone();
    let mut dt = controls.dt_init;

    for i in 1..=n_rec {
        let target = if i == n_rec {
            t_end
        } else {
            state0.t + i as f64 * controls.record_every
        };
        while cur.t < target {
            let remaining = target - cur.t;
            let snapped = remaining <= dt * (1.0 + 1e-6);
            let h = if snapped { remaining } else { dt };
            let prev = cur.clone();
            match integ.advance(&cur, h) {
                Ok(out) => {
                    traj.steps += 1;
                    let full = out.dt_used == h;
                    cur = out.state;
                    if snapped && full {
                        cur.t = target;
                    }
                    if !fixed && !(snapped && full) {
                        dt = out.dt_next;
                    } else if !fixed {
                        dt = dt.max(out.dt_next);
                    }
                    let norm = xs_norm(&cur, s);
                    if !(norm <= threshold) {
                        let hit = locate_crossing(&mut integ, &prev, cur, threshold, s);
                        traj.samples.push(Sample::new(params, hit));
                        traj.termination = Termination::EscapeDetected;
                        return Ok(traj);
                    }
                    if traj.steps >= controls.max_steps && cur.t < target {
                        traj.samples.push(Sample::new(params, cur));
                        traj.termination = Termination::MaxStepsExceeded;
                        traj.message = Some(format!("step budget {} exhausted", controls.max_steps));
                        return Ok(traj);
                    }
                }
                Err(DyadicError::StepUnderflow { t, dt }) => {
                    traj.termination = Termination::StepUnderflow;
                    traj.message = Some(format!("step underflow at t = {t:?} (dt = {dt:?})"));
                    return Ok(traj);
                }
                Err(DyadicError::Escape { t }) => {
                    traj.termination = Termination::EscapeDetected;
                    traj.message = Some(format!("non-finite state at t = {t:?}"));
                    return Ok(traj);
                }
                Err(e) => return Err(e),
            }
        }
        let violation = admissible.then(|| monotone_violation(&cur)).flatten();
        traj.samples.push(Sample::new(params, cur.clone()));
        if let Some(k) = violation {
            traj.termination = Termination::MonotonicityLost;
            traj.message = Some(format!("monotonicity lost at t = {:?}, index {k}", cur.t));
            return Ok(traj);
        }
    }
    Ok(traj)
}

/// Narrows the step `prev -> over` (which crossed `threshold`) down to the
/// first state whose norm exceeds it, by bisection on the step length.
fn locate_crossing(
    integ: &mut Integrator,
    prev: &DyadicState,
    over: DyadicState,
    threshold: f64,
    s: f64,
) -> DyadicState {
    if !over.values().iter().all(|v| v.is_finite()) {
        return over;
    }
    let (mut lo, mut hi) = (0.0, over.t - prev.t);
    let mut best = over;
    while hi - lo > 1e-12 * (1.0 + prev.t.abs()) {
        let mid = 0.5 * (lo + hi);
        match advance_by(integ, prev, mid) {
            Some(st) if xs_norm(&st, s) > threshold => {
                hi = mid;
                best = st;
            }
            Some(_) => lo = mid,
            None => break,
        }
    }
    best
}

fn advance_by(integ: &mut Integrator, from: &DyadicState, tau: f64) -> Option<DyadicState> {
    let target = from.t + tau;
    let mut cur = from.clone();
    while cur.t < target {
        let out = integ.advance(&cur, target - cur.t).ok()?;
        let full = out.dt_used == target - cur.t;
        cur = out.state;
        if full {
            cur.t = target;
        }
    }
    Some(cur)
}

fn monotone_violation(state: &DyadicState) -> Option<usize> {
    let a = state.values();
    if a[0] < -MONOTONE_TOL {
        return Some(0);
    }
    (1..a.len()).find(|&k| a[k] - a[k - 1] < -MONOTONE_TOL)
}
