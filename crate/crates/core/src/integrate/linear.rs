use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{DyadicError, Result};
use crate::model::{Dissipation, DyadicState, ModelParams};
use crate::sum::CompensatedSum;

/// The linear flow `a' = -L a` written in slope variables
/// `y = (a_0, b_1, ..., b_K)`, `b_k = (a_k - a_{k-1}) 2^k`.
///
/// In these variables the generator is upper triangular and free of the
/// cancellations that make differences of `(L a)_k` inaccurate at large `k`:
///
/// * `y_0' = sum_j c_j 2^{1-2j} b_j`
/// * `b_k' = -(W_k + w_{k-1} c_k) b_k + (w_k - w_{k-1}/2) sum_{j>k} c_j 2^{2k-2j+1} b_j`
///
/// with `w_n = 2^{2 alpha n}`, `W_k = sum_{n<k} w_n` and `c_j` the tail
/// coefficient (1 for the plateau tail, `1 - 2^{j-K-1}` for the zero tail).
/// Propagators `e^{tG}` are computed by scaling and squaring.
#[derive(Clone, Debug)]
pub struct LinearFlow {
    generator: DMatrix<f64>,
    cache: HashMap<u64, Arc<DMatrix<f64>>>,
}

const CACHE_LIMIT: usize = 256;

impl LinearFlow {
    /// Generator of `-L`. For `alpha == 0` the inviscid system has no linear
    /// part and the generator is zero.
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let dim = params.dim();
        let mut g = DMatrix::zeros(dim, dim);
        if !params.is_inviscid() {
            let op = Dissipation::for_params(params);
            let kmax = params.trunc_k;
            for j in 1..=kmax {
                g[(0, j)] = op.tail_coeff(j) * (1.0 - 2.0 * j as f64).exp2();
            }
            for k in 1..=kmax {
                let wk = op.weight(k);
                let wkm = op.weight(k - 1);
                g[(k, k)] = -(op.weight_prefix(k) + wkm * op.tail_coeff(k));
                let coupling = wk - 0.5 * wkm;
                for j in k + 1..=kmax {
                    g[(k, j)] = coupling
                        * op.tail_coeff(j)
                        * (2.0 * k as f64 - 2.0 * j as f64 + 1.0).exp2();
                }
            }
        }
        Ok(Self {
            generator: g,
            cache: HashMap::new(),
        })
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    /// `e^{tau G}` (uncached).
    pub fn propagator(&self, tau: f64) -> DMatrix<f64> {
        if tau == 0.0 {
            return DMatrix::identity(self.dim(), self.dim());
        }
        (&self.generator * tau).exp()
    }

    /// `e^{tau G}`, memoised on the exact bit pattern of `tau`.
    pub fn propagator_cached(&mut self, tau: f64) -> Arc<DMatrix<f64>> {
        if let Some(p) = self.cache.get(&tau.to_bits()) {
            return Arc::clone(p);
        }
        if self.cache.len() >= CACHE_LIMIT {
            self.cache.clear();
        }
        let p = Arc::new(self.propagator(tau));
        self.cache.insert(tau.to_bits(), Arc::clone(&p));
        p
    }

    /// `G y`.
    pub fn apply_generator(&self, y: &[f64]) -> Vec<f64> {
        let v = &self.generator * DVector::from_column_slice(y);
        v.as_slice().to_vec()
    }

    /// Advances `a` by `e^{-tau L}` (input and output in value coordinates).
    pub fn evolve(&mut self, a: &[f64], tau: f64) -> Vec<f64> {
        let y = DVector::from_vec(to_slope(a));
        let p = self.propagator_cached(tau);
        from_slope((&*p * y).as_slice())
    }
}

/// `(a_0, b_1, ..., b_K)` from values.
pub(crate) fn to_slope(a: &[f64]) -> Vec<f64> {
    let mut y = Vec::with_capacity(a.len());
    y.push(a[0]);
    for k in 1..a.len() {
        y.push((a[k] - a[k - 1]) * (k as f64).exp2());
    }
    y
}

/// Values from `(a_0, b_1, ..., b_K)`, summing the increments with compensation.
pub(crate) fn from_slope(y: &[f64]) -> Vec<f64> {
    let mut a = Vec::with_capacity(y.len());
    let mut acc = CompensatedSum::new();
    acc.add(y[0]);
    a.push(y[0]);
    for (k, &b) in y.iter().enumerate().skip(1) {
        acc.add(b * (-(k as f64)).exp2());
        a.push(acc.value());
    }
    a
}

/// `e^{-tL} a` for `t >= 0`.
pub fn linear_semigroup(params: &ModelParams, state: &DyadicState, t: f64) -> Result<DyadicState> {
    params.validate()?;
    state.check_dim(params)?;
    if params.is_inviscid() {
        return Err(DyadicError::Domain(
            "the linear semigroup needs alpha > 0".into(),
        ));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(DyadicError::Domain(format!("t must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let flow = LinearFlow::new(params)?;
    let y = DVector::from_vec(to_slope(state.values()));
    let a = from_slope((flow.propagator(t) * y).as_slice());
    DyadicState::new(state.t + t, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dissipation, Tail};
    use proptest::prelude::*;

    #[test]
    fn slope_round_trip() {
        let a = vec![0.25, 0.5, 1.0, 1.125, 1.5];
        assert_eq!(from_slope(&to_slope(&a)), a);
    }

    #[test]
    fn zero_time_is_identity_and_constants_are_fixed() {
        let p = ModelParams::new(0.3, 6).unwrap();
        let s = DyadicState::new(0.0, vec![0.0, 0.3, 0.5, 0.6, 0.9, 1.0, 1.0]).unwrap();
        assert_eq!(linear_semigroup(&p, &s, 0.0).unwrap(), s);
        let c = DyadicState::constant(0.0, 6, 2.5).unwrap();
        let out = linear_semigroup(&p, &c, 3.0).unwrap();
        assert!(out.values().iter().all(|&x| (x - 2.5).abs() < 1e-14));
        assert!(linear_semigroup(&p, &s, -1.0).is_err());
        assert!(linear_semigroup(&ModelParams::inviscid(6).unwrap(), &s, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn generator_matches_operator(
            incs in proptest::collection::vec(0.0f64..1.0, 2..24),
            alpha in 0.05f64..0.45,
            zero_tail in any::<bool>(),
        ) {
            let mut a = vec![0.0];
            for d in incs {
                let last = *a.last().unwrap();
                a.push(last + d);
            }
            let k = a.len() - 1;
            let tail = if zero_tail { Tail::Zero } else { Tail::Plateau };
            let p = ModelParams::new(alpha, k).unwrap().with_tail(tail);
            let flow = LinearFlow::new(&p).unwrap();
            let gy = flow.apply_generator(&to_slope(&a));
            let la = dissipation(&p, &DyadicState::new(0.0, a).unwrap()).unwrap();
            let scale = la.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
            prop_assert!((gy[0] + la[0]).abs() <= 1e-12 * scale);
            for j in 1..=k {
                let want = -(la[j] - la[j - 1]) * (j as f64).exp2();
                let tol = 1e-11 * scale * (j as f64).exp2();
                prop_assert!((gy[j] - want).abs() <= tol, "k={j}: {} vs {want}", gy[j]);
            }
        }
    }
}
