use std::f64::consts::SQRT_2;

use super::report::InvariantReport;
use crate::error::{DyadicError, Result};
use crate::integrate::Trajectory;
use crate::model::{slopes, DyadicState};

/// Absolute tolerance for slope-ordering checks.
pub const RATIO_TOL: f64 = 1e-9;
/// Relative cut-off below which a denominator slope counts as zero.
const RELATIVE_ZERO: f64 = 1e-14;
/// Multiple of machine epsilon in the rounding floor of a differenced slope.
const FLOOR_ULPS: f64 = 64.0;

/// Rounding floor of each slope: `b_k` is a difference of values of size
/// `max |a|` scaled by `2^k`, so below `~ eps 2^k max|a|` it carries no
/// information.
pub fn resolution_floor(state: &DyadicState) -> Vec<f64> {
    let amax = state.values().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    (0..state.len())
        .map(|k| FLOOR_ULPS * f64::EPSILON * amax * (k as f64).exp2())
        .collect()
}

struct Resolved {
    b: Vec<f64>,
    cut: Vec<f64>,
}

impl Resolved {
    fn new(state: &DyadicState) -> Self {
        let b = slopes(state).0;
        let bmax = b.iter().copied().fold(0.0_f64, f64::max);
        let cut = resolution_floor(state)
            .into_iter()
            .map(|f| f.max(RELATIVE_ZERO * bmax))
            .collect();
        Self { b, cut }
    }

    /// Whether `b_k / b_{k-1}` is meaningful (`b_0 = 0` is exact, so `k = 1`
    /// is never resolved as a ratio).
    fn pair(&self, k: usize) -> bool {
        k >= 2 && self.b[k - 1] > self.cut[k]
    }

    /// `b_{k-1}`, treating the exact convention `b_0 = 0` as resolved.
    fn prev_resolved(&self, k: usize) -> bool {
        k == 1 || self.b[k - 1] > self.cut[k]
    }

    /// Largest `k` with `b_k >= b_{k-1}` among resolved entries; at least 1.
    fn last_ascent(&self) -> usize {
        (2..self.b.len())
            .rev()
            .find(|&k| self.prev_resolved(k) && self.b[k] >= self.b[k - 1])
            .unwrap_or(1)
    }
}

/// Largest slope ratio `b_k / b_{k-1}` over `k >= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeRatio {
    /// `None` when no pair is resolved (e.g. all slopes zero).
    pub max_ratio: Option<f64>,
    pub argmax: Option<usize>,
    /// Pairs skipped because `b_{k-1}` is below resolution.
    pub skipped: usize,
}

pub fn slope_ratio_report(state: &DyadicState) -> SlopeRatio {
    let r = Resolved::new(state);
    let mut out = SlopeRatio {
        max_ratio: None,
        argmax: None,
        skipped: 0,
    };
    for k in 2..r.b.len() {
        if !r.pair(k) {
            out.skipped += 1;
            continue;
        }
        let ratio = r.b[k] / r.b[k - 1];
        if out.max_ratio.is_none_or(|m| ratio > m) {
            out.max_ratio = Some(ratio);
            out.argmax = Some(k);
        }
    }
    out
}

/// Smallest `k >= 1` attaining `max_k b_k`; `None` if no slope is positive.
pub fn front_index(state: &DyadicState) -> Option<usize> {
    let b = slopes(state).0;
    let mut best: Option<usize> = None;
    for k in 1..b.len() {
        if b[k] > 0.0 && best.is_none_or(|j| b[k] > b[j]) {
            best = Some(k);
        }
    }
    best
}

/// `sup_{k>=1} |b_k| 2^{k(beta-1)}`.
pub fn holder_seminorm(state: &DyadicState, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(DyadicError::Domain(format!("beta must lie in (0, 1], got {beta}")));
    }
    let b = slopes(state).0;
    Ok((1..b.len()).fold(0.0_f64, |m, k| {
        m.max(b[k].abs() * (k as f64 * (beta - 1.0)).exp2())
    }))
}

/// `(t, K_t)` with `K_t` the running maximum of the last ascent index:
/// beyond `K_t` slopes decrease, and `K_t` never moves back.
pub fn structural_front_series(traj: &Trajectory) -> Vec<(f64, usize)> {
    let mut kt = 0;
    traj.samples
        .iter()
        .map(|s| {
            kt = kt.max(Resolved::new(&s.state).last_ascent());
            (s.t(), kt)
        })
        .collect()
}

/// Front structure: at every sample `b_k < sqrt(2) b_{k-1}` for all resolved
/// `k >= 2`, and slopes decrease beyond a non-decreasing index `K_t`.
///
/// `K_t` is the running maximum of the last ascent index, so the descending
/// part holds by construction; the substantive condition is the ratio bound,
/// checked on the whole range (not just `k <= K_t`). The smallest argmax of
/// `b` can retreat under dissipation; how often it does is reported in
/// `extras["front_retreats"]`.
pub fn check_sqrt2_structure(traj: &Trajectory) -> InvariantReport {
    let mut rep = InvariantReport::new("sqrt2_structure", RATIO_TOL);
    let mut retreats = 0usize;
    let mut prev_front: Option<usize> = None;
    for s in &traj.samples {
        let r = Resolved::new(&s.state);
        for k in 2..r.b.len() {
            if r.pair(k) {
                rep.observe(SQRT_2 * r.b[k - 1] - r.b[k], s.t(), k);
            } else {
                rep.skip();
            }
        }
        let front = front_index(&s.state);
        if let (Some(p), Some(f)) = (prev_front, front) {
            if f < p {
                retreats += 1;
            }
        }
        prev_front = front;
    }
    let series = structural_front_series(traj);
    let k0 = series.first().map_or(0, |x| x.1);
    let kt = series.last().map_or(0, |x| x.1);
    rep.with_extra("k_0", k0 as f64)
        .with_extra("k_t_final", kt as f64)
        .with_extra("front_retreats", retreats as f64)
}

/// `b_k <= 2^{(k-1)/2} b_1` at every sample.
pub fn check_holder_half(traj: &Trajectory) -> InvariantReport {
    let mut rep = InvariantReport::new("holder_half", RATIO_TOL);
    for s in &traj.samples {
        let b = slopes(&s.state).0;
        for k in 1..b.len() {
            let bound = ((k as f64 - 1.0) * 0.5).exp2() * b[1];
            rep.observe(bound - b[k], s.t(), k);
        }
    }
    rep
}

/// Sample-to-sample persistence of the slope orderings of the inviscid
/// system: for `c` in `{sqrt(2), 1}`, if `b_{k-1} < c b_{k-2}` at both ends of
/// an interval and `b_k < c b_{k-1}` at its start, then `b_k < c b_{k-1}` at
/// its end; likewise with every `<` replaced by `>`.
pub fn check_ordering_persistence_inviscid(traj: &Trajectory) -> InvariantReport {
    let mut rep = InvariantReport::new("ordering_persistence", RATIO_TOL);
    if !traj.params.is_inviscid() {
        return rep.fail("ordering persistence concerns the inviscid system (alpha = 0)");
    }
    for w in traj.samples.windows(2) {
        let (p, q) = (Resolved::new(&w[0].state), Resolved::new(&w[1].state));
        let tq = w[1].t();
        for k in 2..p.b.len() {
            let resolved = |r: &Resolved| r.prev_resolved(k - 1) && r.pair(k);
            if !(resolved(&p) && resolved(&q)) {
                rep.skip();
                continue;
            }
            for c in [SQRT_2, 1.0] {
                let below = |r: &Resolved, j: usize| r.b[j] < c * r.b[j - 1];
                let above = |r: &Resolved, j: usize| r.b[j] > c * r.b[j - 1];
                if below(&p, k - 1) && below(&q, k - 1) && below(&p, k) {
                    rep.observe(c * q.b[k - 1] - q.b[k], tq, k);
                }
                if above(&p, k - 1) && above(&q, k - 1) && above(&p, k) {
                    rep.observe(q.b[k] - c * q.b[k - 1], tq, k);
                }
            }
        }
    }
    rep
}
