//! Diagnostics and invariant checks over states and trajectories.
//!
//! Every check returns an [`InvariantReport`] with a signed worst-case margin
//! (negative means violated) so results can be compared across runs.

mod blowup;
mod coercivity;
mod dynamics;
mod goodbad;
mod preservation;
mod report;
mod slopes;

pub use blowup::{
    j_functional, j_rate_inviscid, riccati_fit, riccati_inequality_check, BlowupDiagnostics,
    JValue,
};
pub use coercivity::check_coercivity;
pub use dynamics::check_weighted_slope_dynamics;
pub use goodbad::{good_bad, GoodBadDecomposition};
pub use preservation::{
    check_max_principle, check_monotone_nonneg, check_monotone_trajectory, MONOTONE_TOL,
};
pub use report::{InvariantReport, Location};
pub use slopes::{
    check_holder_half, check_ordering_persistence_inviscid, check_sqrt2_structure, front_index,
    holder_seminorm, resolution_floor, slope_ratio_report, structural_front_series, SlopeRatio,
    RATIO_TOL,
};

use crate::error::{DyadicError, Result};
use crate::integrate::Trajectory;

/// Check identifiers accepted by [`run_check`] (and by run configurations).
pub const CHECK_NAMES: &[&str] = &[
    "monotone",
    "max_principle",
    "sqrt2_structure",
    "holder_half",
    "ordering_persistence",
    "riccati",
    "weighted_slope_dynamics",
];

/// Runs a named trajectory check.
pub fn run_check(name: &str, traj: &Trajectory) -> Result<InvariantReport> {
    let delta = traj.params.delta;
    Ok(match name {
        "monotone" => check_monotone_trajectory(traj),
        "max_principle" => check_max_principle(traj)?,
        "sqrt2_structure" => check_sqrt2_structure(traj),
        "holder_half" => check_holder_half(traj),
        "ordering_persistence" => check_ordering_persistence_inviscid(traj),
        "riccati" => riccati_inequality_check(traj, delta)?,
        "weighted_slope_dynamics" => check_weighted_slope_dynamics(traj)?,
        other => {
            return Err(DyadicError::Config(format!(
                "unknown check `{other}` (expected one of {})",
                CHECK_NAMES.join(", ")
            )))
        }
    })
}

/// Three-point derivative at interior sample `i` on a possibly non-uniform grid.
pub(crate) fn three_point_derivative(t: &[f64], f: &[f64], i: usize) -> f64 {
    let h1 = t[i] - t[i - 1];
    let h2 = t[i + 1] - t[i];
    (h1 * h1 * f[i + 1] - h2 * h2 * f[i - 1] + (h2 * h2 - h1 * h1) * f[i])
        / (h1 * h2 * (h1 + h2))
}
