use super::operator::Dissipation;
use super::params::ModelParams;
use super::state::DyadicState;
use crate::error::{DyadicError, Result};

/// Reusable right-hand side for the integrators.
///
/// * `alpha == 0`: `a_0' = 0`, `a_k' = -(a_k - a_{k-1})^2 2^k`.
/// * `alpha > 0`: `a_0' = -(L a)_0`, `a_k' = -(a_k - a_{k-1})^2 2^k - (L a)_k`.
/// * linear-only: `a' = -L a`.
#[derive(Clone, Debug)]
pub struct Rhs {
    params: ModelParams,
    op: Option<Dissipation>,
    pow2: Vec<f64>,
}

impl Rhs {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let op = (!params.is_inviscid()).then(|| Dissipation::for_params(params));
        let pow2 = (0..=params.trunc_k).map(|k| (k as f64).exp2()).collect();
        Ok(Self {
            params: *params,
            op,
            pow2,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dissipation(&self) -> Option<&Dissipation> {
        self.op.as_ref()
    }

    pub fn eval_into(&self, a: &[f64], out: &mut [f64]) {
        match &self.op {
            Some(op) => {
                op.apply(a, out);
                for x in out.iter_mut() {
                    *x = -*x;
                }
            }
            None => out.fill(0.0),
        }
        if self.params.nonlinear {
            for k in 1..a.len() {
                let d = a[k] - a[k - 1];
                out[k] -= d * d * self.pow2[k];
            }
        }
    }

    pub fn eval(&self, state: &DyadicState) -> Result<Vec<f64>> {
        state.check_dim(&self.params)?;
        let mut out = vec![0.0; state.len()];
        self.eval_into(state.values(), &mut out);
        Ok(out)
    }
}

/// Inviscid right-hand side; `a_0` is pinned so component 0 is exactly zero.
pub fn rhs_inviscid(state: &DyadicState) -> Vec<f64> {
    let a = state.values();
    let mut out = vec![0.0; a.len()];
    for k in 1..a.len() {
        let d = a[k] - a[k - 1];
        out[k] = -d * d * (k as f64).exp2();
    }
    out
}

/// Full dissipative right-hand side. Requires `alpha > 0`.
pub fn rhs_full(params: &ModelParams, state: &DyadicState) -> Result<Vec<f64>> {
    if params.alpha <= 0.0 {
        return Err(DyadicError::Domain(
            "rhs_full needs alpha > 0; use rhs_inviscid for alpha = 0".into(),
        ));
    }
    Rhs::new(params)?.eval(state)
}

/// Right-hand side selected by `params` (inviscid, full, or linear-only).
pub fn rhs(params: &ModelParams, state: &DyadicState) -> Result<Vec<f64>> {
    Rhs::new(params)?.eval(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn st(a: &[f64]) -> DyadicState {
        DyadicState::new(0.0, a.to_vec()).unwrap()
    }

    #[test]
    fn inviscid_examples() {
        assert_eq!(rhs_inviscid(&st(&[0.0, 1.0, 1.0])), vec![0.0, -2.0, 0.0]);
        assert_eq!(rhs_inviscid(&st(&[0.0, 0.0, 0.0])), vec![0.0; 3]);
        assert_eq!(rhs_inviscid(&st(&[0.0, 0.5, 0.75])), vec![0.0, -0.5, -0.25]);
    }

    #[test]
    fn full_examples() {
        let p = ModelParams::new(0.25, 2).unwrap();
        let got = rhs_full(&p, &st(&[0.0, 1.0, 1.0])).unwrap();
        for (g, w) in got.iter().zip([1.0, -3.0, -1.0]) {
            assert_relative_eq!(*g, w, epsilon = 1e-15);
        }
        assert_eq!(rhs_full(&p, &st(&[0.0; 3])).unwrap(), vec![0.0; 3]);
        for alpha in [0.05, 0.25, 0.45] {
            let p = ModelParams::new(alpha, 6).unwrap();
            let out = rhs_full(&p, &st(&[2.5; 7])).unwrap();
            assert!(out.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn full_rejects_inviscid_params() {
        let p = ModelParams::inviscid(4).unwrap();
        assert!(rhs_full(&p, &st(&[0.0; 5])).is_err());
    }

    #[test]
    fn inviscid_equilibrium_with_pinned_origin() {
        let p = ModelParams::inviscid(5).unwrap();
        assert_eq!(rhs(&p, &st(&[0.0; 6])).unwrap(), vec![0.0; 6]);
    }

    #[test]
    fn linear_only_drops_transport() {
        let p = ModelParams::new(0.25, 2).unwrap().linear_only();
        let got = rhs(&p, &st(&[0.0, 1.0, 1.0])).unwrap();
        for (g, w) in got.iter().zip([1.0, -1.0, -1.0]) {
            assert_relative_eq!(*g, w, epsilon = 1e-15);
        }
    }
}
