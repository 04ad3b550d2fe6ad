//! One configured run end to end: initial data, integration, checks.

use crate::analysis::{run_check, BlowupDiagnostics, InvariantReport};
use crate::error::{DyadicError, Result};
use crate::integrate::{integrate, Trajectory};
use crate::io::RunConfig;
use crate::model::{slopes, DyadicState};

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub reports: Vec<InvariantReport>,
    pub blowup: BlowupDiagnostics,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }
}

/// Integrates the configured scenario and evaluates the configured checks.
pub fn simulate(cfg: &RunConfig) -> Result<RunOutcome> {
    let state0 = cfg.scenario.build(cfg.params.trunc_k)?;
    let trajectory = integrate(&cfg.params, &state0, cfg.t_end, &cfg.controls)?;
    let reports = run_checks(&trajectory, &cfg.checks)?;
    let blowup = BlowupDiagnostics::from_trajectory(&trajectory, cfg.params.delta)?;
    Ok(RunOutcome {
        trajectory,
        reports,
        blowup,
    })
}

pub fn run_checks(traj: &Trajectory, checks: &[String]) -> Result<Vec<InvariantReport>> {
    checks.iter().map(|c| run_check(c, traj)).collect()
}

/// Deliberate corruption of a finished trajectory, used to confirm that the
/// checks notice violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultKind {
    /// Negates one increment `a_k - a_{k-1}` in the final sample.
    SignFlip,
    /// Sets `b_2 = 1.5 b_1` in the final sample.
    RatioSpike,
}

impl FaultKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sign_flip" => Ok(Self::SignFlip),
            "ratio_spike" => Ok(Self::RatioSpike),
            other => Err(DyadicError::Config(format!(
                "unknown fault `{other}` (expected sign_flip or ratio_spike)"
            ))),
        }
    }

    /// The check that this fault is designed to trip.
    pub fn target_check(self) -> &'static str {
        match self {
            Self::SignFlip => "monotone",
            Self::RatioSpike => "sqrt2_structure",
        }
    }
}

/// Returns a copy of `traj` whose final sample is corrupted by `kind`.
pub fn inject_fault(traj: &Trajectory, kind: FaultKind) -> Result<Trajectory> {
    let last = &traj.last().state;
    let mut b = slopes(last).values().to_vec();
    let a0 = last.values()[0];
    let k = match kind {
        FaultKind::SignFlip => {
            let k = (1..b.len()).max_by(|&i, &j| b[i].abs().total_cmp(&b[j].abs())).unwrap_or(1);
            b[k] = if b[k] == 0.0 { -1.0 } else { -b[k] };
            k
        }
        FaultKind::RatioSpike => {
            if b[1] == 0.0 {
                b[1] = 1.0;
            }
            b[2] = 1.5 * b[1];
            2
        }
    };
    let corrupted = DyadicState::from_slopes(last.t, a0, &b[1..])?;
    let mut states: Vec<DyadicState> = traj.samples.iter().map(|s| s.state.clone()).collect();
    *states.last_mut().expect("non-empty") = corrupted;
    let mut out = Trajectory::from_states(&traj.params, states, traj.termination)?;
    out.steps = traj.steps;
    out.message = Some(format!("fault {kind:?} injected at index {k}"));
    Ok(out)
}
