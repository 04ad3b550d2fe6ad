use super::report::InvariantReport;
use crate::error::{DyadicError, Result};
use crate::integrate::Trajectory;
use crate::model::DyadicState;

/// Undershoot allowed below zero for monotonicity and positivity.
pub const MONOTONE_TOL: f64 = 1e-10;
/// Allowed drift of `sup_k a_k` on inviscid runs.
const SUP_CONSERVATION_TOL: f64 = 1e-8;

fn observe_state(report: &mut InvariantReport, state: &DyadicState) {
    let a = state.values();
    report.observe(a[0], state.t, 0);
    for k in 1..a.len() {
        report.observe(a[k] - a[k - 1], state.t, k);
    }
}

/// Non-negativity and monotonicity: margin `min(a_0, min_k (a_k - a_{k-1}))`.
pub fn check_monotone_nonneg(state: &DyadicState) -> InvariantReport {
    let mut r = InvariantReport::new("monotone_nonneg", MONOTONE_TOL);
    observe_state(&mut r, state);
    r
}

/// [`check_monotone_nonneg`] over every sample.
pub fn check_monotone_trajectory(traj: &Trajectory) -> InvariantReport {
    let mut r = InvariantReport::new("monotone_nonneg", MONOTONE_TOL);
    for s in &traj.samples {
        observe_state(&mut r, &s.state);
    }
    r
}

/// Maximum principle across samples.
///
/// With dissipation, `sup_k a_k` must not increase and `a_0` must not
/// decrease. Without it, `sup_k a_k` is conserved and `a_0` stays at its
/// initial value 0.
pub fn check_max_principle(traj: &Trajectory) -> Result<InvariantReport> {
    if traj.samples.is_empty() {
        return Err(DyadicError::InvalidInput("empty trajectory".into()));
    }
    let first = &traj.first().state;
    if traj.params.is_inviscid() {
        let mut r = InvariantReport::new("max_principle", SUP_CONSERVATION_TOL);
        let sup0 = first.sup();
        for s in &traj.samples {
            let st = &s.state;
            let k_sup = st.len() - 1;
            r.observe(-(st.sup() - sup0).abs(), st.t, k_sup);
            r.observe(-st.values()[0].abs(), st.t, 0);
        }
        return Ok(r);
    }
    let mut r = InvariantReport::new("max_principle", MONOTONE_TOL);
    if traj.samples.len() == 1 {
        r.observe(0.0, first.t, 0);
    }
    for w in traj.samples.windows(2) {
        let (p, q) = (&w[0].state, &w[1].state);
        r.observe(p.sup() - q.sup(), q.t, q.len() - 1);
        r.observe(q.values()[0] - p.values()[0], q.t, 0);
    }
    Ok(r)
}
