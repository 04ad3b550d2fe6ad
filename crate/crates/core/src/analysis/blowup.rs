use serde::{Deserialize, Serialize};

use super::report::InvariantReport;
use super::slopes::structural_front_series;
use super::three_point_derivative;
use crate::error::{DyadicError, Result};
use crate::integrate::{Termination, Trajectory};
use crate::model::{slopes, DyadicState};
use crate::sum::CompensatedSum;

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(DyadicError::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `J = sum_{k=1}^K (a_K - a_k) 2^{k delta}` with a flag for monotone input
/// (the functional is only meaningful there).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JValue {
    pub value: f64,
    pub monotone: bool,
}

pub fn j_functional(state: &DyadicState, delta: f64) -> Result<JValue> {
    check_delta(delta)?;
    let a = state.values();
    let ak = a[a.len() - 1];
    let mut acc = CompensatedSum::new();
    for (k, &x) in a.iter().enumerate().skip(1) {
        acc.add((ak - x) * (k as f64 * delta).exp2());
    }
    Ok(JValue {
        value: acc.value(),
        monotone: a.windows(2).all(|w| w[1] >= w[0]),
    })
}

/// Exact `dJ/dt` along the truncated inviscid system:
/// `sum_k b_k^2 2^{k(delta-1)} - b_K^2 2^{-K} sum_{k=1}^K 2^{k delta}`.
///
/// The second term is the drift of `a_K`, which is not conserved once the
/// cascade reaches the cutoff.
pub fn j_rate_inviscid(state: &DyadicState, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let b = slopes(state).0;
    let kmax = b.len() - 1;
    let drift = b[kmax] * b[kmax] * (-(kmax as f64)).exp2();
    let mut acc = CompensatedSum::new();
    for (k, &bk) in b.iter().enumerate().skip(1) {
        let w = (k as f64 * delta).exp2();
        acc.add(bk * bk * (k as f64 * (delta - 1.0)).exp2());
        acc.add(-drift * w);
    }
    Ok(acc.value())
}

/// Predicted blow-up time from a `(t, J)` series.
///
/// Takes the increasing run of positive `J` that ends at the first maximum,
/// fits `1/J = m t + c` by least squares on its trailing half and returns the
/// root `-c/m` when `m` is negative by more than three standard errors.
pub fn riccati_fit(series: &[(f64, f64)]) -> Option<f64> {
    if series.len() < 3 {
        return None;
    }
    let mut peak = 0;
    for (i, &(_, j)) in series.iter().enumerate() {
        if j > series[peak].1 {
            peak = i;
        }
    }
    let mut start = peak;
    while start > 0 && series[start - 1].1 > 0.0 && series[start - 1].1 < series[start].1 {
        start -= 1;
    }
    if series[start].1 <= 0.0 {
        start += 1;
    }
    let run = &series[start..=peak];
    if run.len() < 3 {
        return None;
    }
    let window = &run[run.len() - (run.len() / 2).max(3)..];
    let n = window.len() as f64;
    let tm = window.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = window.iter().map(|p| 1.0 / p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(t, j) in window {
        sxx += (t - tm) * (t - tm);
        sxy += (t - tm) * (1.0 / j - ym);
    }
    if sxx <= 0.0 {
        return None;
    }
    let m = sxy / sxx;
    let c = ym - m * tm;
    let ssr: f64 = window
        .iter()
        .map(|&(t, j)| {
            let r = 1.0 / j - (m * t + c);
            r * r
        })
        .sum();
    let se = if window.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (m < 0.0 && -m > 3.0 * se).then(|| -c / m)
}

/// Differential law of `J` along a trajectory.
///
/// Inviscid runs: the identity `dJ/dt = sum_k b_k^2 2^{k(delta-1)}` (with the
/// cutoff drift correction of [`j_rate_inviscid`]) against a three-point
/// difference of the samples; margin is minus the defect relative to
/// `1 + |rate|`, tolerance the mean cadence.
///
/// Dissipative runs: estimates constants in `dJ/dt >= C1 J^2 - C2 (1 + sup|a|)`
/// and reports them. `C1` is the lower envelope of `(dJ/dt) / J^2` over the
/// samples where `J` grows (0 if it never does), `C2` the smallest value making
/// the inequality hold at every sample. The margin is the relative slack of the
/// inequality with those constants.
pub fn riccati_inequality_check(traj: &Trajectory, delta: f64) -> Result<InvariantReport> {
    check_delta(delta)?;
    let inviscid = traj.params.is_inviscid();
    let name = if inviscid { "riccati_identity" } else { "riccati_inequality" };
    let t: Vec<f64> = traj.times();
    let j: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| j_functional(&s.state, delta).map(|v| v.value))
        .collect::<Result<_>>()?;
    if t.len() < 3 {
        return Ok(InvariantReport::new(name, 0.0).with_note("fewer than three samples"));
    }
    if inviscid {
        let mut rep = InvariantReport::new(name, traj.mean_cadence());
        for i in 1..t.len() - 1 {
            let fd = three_point_derivative(&t, &j, i);
            let rate = j_rate_inviscid(&traj.samples[i].state, delta)?;
            rep.observe(-(fd - rate).abs() / (1.0 + rate.abs()), t[i], 0);
        }
        return Ok(rep);
    }

    let mut pts = Vec::with_capacity(t.len());
    for i in 1..t.len() - 1 {
        let st = &traj.samples[i].state;
        let sup = st.values().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        pts.push((t[i], three_point_derivative(&t, &j, i), j[i], 1.0 + sup));
    }
    // Lower envelope: C1 is the largest constant with fd >= C1 J^2 on every
    // growth sample, C2 the smallest one closing the inequality everywhere.
    let growth: Vec<_> = pts.iter().filter(|p| p.1 > 0.0 && p.2 > 0.0).copied().collect();
    let mut note = None;
    let c1 = if growth.is_empty() {
        note = Some("J does not grow; C1 = 0".to_string());
        0.0
    } else {
        growth.iter().map(|&(_, fd, jj, _)| fd / (jj * jj)).fold(f64::INFINITY, f64::min)
    };
    let c2 = pts
        .iter()
        .map(|&(_, fd, jj, s)| (c1 * jj * jj - fd) / s)
        .fold(0.0_f64, f64::max);
    let mut rep = InvariantReport::new(name, 1e-12);
    for &(ti, fd, jj, s) in &pts {
        rep.observe((fd - (c1 * jj * jj - c2 * s)) / (1.0 + fd.abs() + c2 * s), ti, 0);
    }
    let mut rep = rep
        .with_extra("c1", c1)
        .with_extra("c2", c2)
        .with_extra("growth_samples", growth.len() as f64);
    rep.note = note;
    Ok(rep)
}

/// Blow-up indicators of one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupDiagnostics {
    pub delta: f64,
    pub j_series: Vec<(f64, f64)>,
    pub riccati_t: Option<f64>,
    /// `(t, K_t)`, see [`structural_front_series`].
    pub front_series: Vec<(f64, usize)>,
    /// Time of the escape sample, if the run stopped on escape.
    pub escape_time: Option<f64>,
}

impl BlowupDiagnostics {
    pub fn from_trajectory(traj: &Trajectory, delta: f64) -> Result<Self> {
        let j_series = traj
            .samples
            .iter()
            .map(|s| Ok((s.t(), j_functional(&s.state, delta)?.value)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            delta,
            riccati_t: riccati_fit(&j_series),
            j_series,
            front_series: structural_front_series(traj),
            escape_time: (traj.termination == Termination::EscapeDetected)
                .then(|| traj.last().t()),
        })
    }
}
