use super::trajectory::Trajectory;
use crate::error::{DyadicError, Result};
use crate::model::xs_norm;

/// Earliest sample time with `||a||_{X^s} > threshold`.
///
/// A finite truncation never blows up, so this is a proxy; compare escape
/// times across truncation levels rather than reading one in isolation.
pub fn detect_escape(traj: &Trajectory, threshold: f64, s: f64) -> Result<Option<f64>> {
    let initial = xs_norm(&traj.first().state, s);
    if !(threshold > initial) {
        return Err(DyadicError::Domain(format!(
            "threshold {threshold} must exceed the initial norm {initial}"
        )));
    }
    Ok(traj
        .samples
        .iter()
        .find(|smp| !(xs_norm(&smp.state, s) <= threshold))
        .map(|smp| smp.t()))
}
