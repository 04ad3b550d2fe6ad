use super::report::InvariantReport;
use super::three_point_derivative;
use crate::error::{DyadicError, Result};
use crate::integrate::Trajectory;
use crate::model::{slopes, weighted_slopes, Dissipation};

/// Tolerance per unit of cadence for the weighted-slope equation.
const CADENCE_FACTOR: f64 = 10.0;
/// Largest `h * lambda_k` for which a sampled difference still tracks mode `k`.
const RESOLVED_STIFFNESS: f64 = 0.05;

/// Compares a three-point difference of `b_{k,s}` (at the model's `norm_s`)
/// with its evolution law
/// `-b_k b_{k,s} + 2^s b_{k-1} b_{k-1,s} - ((L a)_k - (L a)_{k-1}) 2^{sk}`.
///
/// The defect at each interior sample is measured relative to
/// `1 + max_k |law_k|`; the tolerance is proportional to the cadence. Indices
/// whose linear relaxation rate `lambda_k` is too fast for the sample spacing
/// `h` (`h lambda_k > 0.05`) cannot be differenced meaningfully and are skipped.
pub fn check_weighted_slope_dynamics(traj: &Trajectory) -> Result<InvariantReport> {
    let p = traj.params;
    let s = p.norm_s;
    let n = traj.len();
    let mut rep = InvariantReport::new("weighted_slope_dynamics", CADENCE_FACTOR * traj.mean_cadence());
    if n < 3 {
        return Ok(rep.with_note("fewer than three samples"));
    }
    let kmax = p.trunc_k;
    let t = traj.times();
    let series: Vec<Vec<f64>> = traj
        .samples
        .iter()
        .map(|smp| weighted_slopes(&smp.state, s).values().to_vec())
        .collect();
    let op = (!p.is_inviscid()).then(|| Dissipation::for_params(&p));
    let h_max = t.windows(2).map(|w| w[1] - w[0]).fold(0.0_f64, f64::max);
    let resolved: Vec<bool> = (0..=kmax)
        .map(|k| match &op {
            Some(op) if k >= 1 => {
                let rate = op.weight_prefix(k) + op.weight(k - 1) * op.tail_coeff(k);
                h_max * rate <= RESOLVED_STIFFNESS
            }
            _ => true,
        })
        .collect();
    let mut inc = vec![0.0; kmax + 1];
    let mut col = vec![0.0; n];
    for i in 1..n - 1 {
        let st = &traj.samples[i].state;
        if st.len() != kmax + 1 {
            return Err(DyadicError::DimensionMismatch {
                expected: kmax + 1,
                got: st.len(),
            });
        }
        let b = slopes(st);
        let bs = &series[i];
        match &op {
            Some(op) => op.apply_increments(st.values(), &mut inc),
            None => inc.fill(0.0),
        }
        let mut law = vec![0.0; kmax + 1];
        for k in 1..=kmax {
            let mut v = -inc[k] * (s * k as f64).exp2();
            if p.nonlinear {
                v -= b.get(k) * bs[k];
                if k >= 2 {
                    v += s.exp2() * b.get(k - 1) * bs[k - 1];
                }
            }
            law[k] = v;
        }
        let scale = 1.0 + law.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for k in 1..=kmax {
            if !resolved[k] {
                rep.skip();
                continue;
            }
            for (c, row) in col.iter_mut().zip(&series) {
                *c = row[k];
            }
            let fd = three_point_derivative(&t, &col, i);
            rep.observe(-(fd - law[k]).abs() / scale, t[i], k);
        }
    }
    Ok(rep)
}
