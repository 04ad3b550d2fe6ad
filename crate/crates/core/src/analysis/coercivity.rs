use super::report::InvariantReport;
use crate::error::Result;
use crate::model::{
    coercivity_constant, cs_constant, weighted_slopes, xs_norm, Dissipation, DyadicState,
    ModelParams,
};

const COERCIVITY_TOL: f64 = 1e-10;

/// Lower bound on dissipation increments at dominant weighted slopes: for
/// every `k >= 2` with `b_{k,s} > c_s ||a||_{X^s}`,
/// `((L a)_k - (L a)_{k-1}) 2^{sk} >= C(alpha) (2^{2 alpha k} - 2^{2 alpha}) b_{k,s}`.
///
/// Indices where the hypothesis fails count as skipped.
pub fn check_coercivity(params: &ModelParams, state: &DyadicState, s: f64) -> Result<InvariantReport> {
    params.validate()?;
    state.check_dim(params)?;
    let c_alpha = coercivity_constant(params.alpha)?;
    let op = Dissipation::for_params(params);
    let mut inc = vec![0.0; state.len()];
    op.apply_increments(state.values(), &mut inc);
    let bs = weighted_slopes(state, s);
    let threshold = cs_constant(s) * xs_norm(state, s);
    let q = (2.0 * params.alpha).exp2();
    let mut rep = InvariantReport::new("coercivity", COERCIVITY_TOL);
    for (k, &dk) in inc.iter().enumerate().skip(2) {
        let bk = bs.get(k);
        if !(bk > threshold) {
            rep.skip();
            continue;
        }
        let lower = c_alpha * ((2.0 * params.alpha * k as f64).exp2() - q) * bk;
        rep.observe(dk * (s * k as f64).exp2() - lower, state.t, k);
    }
    Ok(rep)
}
