use super::state::{DyadicState, SlopeVector, WeightedSlopeVector};

/// `sup_k |a_k|`.
pub fn sup_abs(state: &DyadicState) -> f64 {
    state.values().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// `b_k = (a_k - a_{k-1}) 2^k` for `k >= 1`, `b_0 = 0`.
pub fn slopes(state: &DyadicState) -> SlopeVector {
    let a = state.values();
    let mut b = Vec::with_capacity(a.len());
    b.push(0.0);
    b.extend(
        a.windows(2)
            .enumerate()
            .map(|(j, w)| (w[1] - w[0]) * ((j + 1) as f64).exp2()),
    );
    SlopeVector(b)
}

/// `b_{k,s} = (a_k - a_{k-1}) 2^{sk}`.
pub fn weighted_slopes(state: &DyadicState, s: f64) -> WeightedSlopeVector {
    let a = state.values();
    let mut bs = Vec::with_capacity(a.len());
    bs.push(0.0);
    bs.extend(
        a.windows(2)
            .enumerate()
            .map(|(j, w)| (w[1] - w[0]) * (s * (j + 1) as f64).exp2()),
    );
    WeightedSlopeVector { s, bs }
}

/// `||a||_{X^s} = sup_k |a_k| + sup_{k>=1} |a_k - a_{k-1}| 2^{sk}` over the stored range.
pub fn xs_norm(state: &DyadicState, s: f64) -> f64 {
    let a = state.values();
    let diff = a
        .windows(2)
        .enumerate()
        .fold(0.0_f64, |m, (j, w)| {
            m.max((w[1] - w[0]).abs() * (s * (j + 1) as f64).exp2())
        });
    sup_abs(state) + diff
}
