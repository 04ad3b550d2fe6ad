//! The discrete fractional dissipation operator
//!
//! ```text
//! (L a)_k = sum_{n<k} (a_k - a_n) 2^{2 alpha n} + sum_{n>k} (a_k - a_n) 2^{2 alpha k} 2^{k-n}
//! ```
//!
//! Two evaluations are provided. [`dissipation_direct`] is the `O(K^2)`
//! double loop used as the reference. [`Dissipation::apply`] is the `O(K)`
//! production path: it rewrites both sums in terms of the increments
//! `d_j = a_j - a_{j-1}`,
//!
//! ```text
//! sum_{n<k} (a_k - a_n) w_n = sum_{j<=k} d_j W_j,      W_j = sum_{n<j} w_n
//! sum_{n>k} (a_n - a_k) 2^{k-n} = G_k,                 G_{k-1} = G_k / 2 + c_k d_k
//! ```
//!
//! where `c_k = 1` under the plateau tail and `c_k = 1 - 2^{k-K-1}` when the
//! tail is dropped. Both reductions have non-negative terms for monotone data,
//! so no cancellation happens until the final `F_k - 2^{2 alpha k} G_k`.

use super::params::{ModelParams, Tail};
use super::state::DyadicState;
use crate::error::{DyadicError, Result};
use crate::sum::CompensatedSum;

/// Precomputed weights for one `(alpha, K, tail)` triple.
#[derive(Clone, Debug)]
pub struct Dissipation {
    alpha: f64,
    tail: Tail,
    /// `w_n = 2^{2 alpha n}`, `n = 0..=K`.
    w: Vec<f64>,
    /// `W_j = sum_{n<j} w_n`, `j = 0..=K`.
    wsum: Vec<f64>,
    /// Tail coefficient `c_k`, `k = 0..=K` (entry 0 unused).
    tailc: Vec<f64>,
}

impl Dissipation {
    pub fn new(alpha: f64, trunc_k: usize, tail: Tail) -> Self {
        let w: Vec<f64> = (0..=trunc_k)
            .map(|n| (2.0 * alpha * n as f64).exp2())
            .collect();
        let mut wsum = Vec::with_capacity(trunc_k + 1);
        let mut acc = CompensatedSum::new();
        for &wn in &w {
            wsum.push(acc.value());
            acc.add(wn);
        }
        let tailc = (0..=trunc_k)
            .map(|k| match tail {
                Tail::Plateau => 1.0,
                Tail::Zero => 1.0 - (k as f64 - trunc_k as f64 - 1.0).exp2(),
            })
            .collect();
        Self {
            alpha,
            tail,
            w,
            wsum,
            tailc,
        }
    }

    pub fn for_params(params: &ModelParams) -> Self {
        Self::new(params.alpha, params.trunc_k, params.tail)
    }

    #[inline]
    pub fn trunc_k(&self) -> usize {
        self.w.len() - 1
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// `2^{2 alpha n}`.
    #[inline]
    pub fn weight(&self, n: usize) -> f64 {
        self.w[n]
    }

    /// `sum_{n<j} 2^{2 alpha n}`.
    #[inline]
    pub fn weight_prefix(&self, j: usize) -> f64 {
        self.wsum[j]
    }

    #[inline]
    pub fn tail_coeff(&self, k: usize) -> f64 {
        self.tailc[k]
    }

    fn check_len(&self, a: &[f64]) -> Result<()> {
        if a.len() != self.w.len() {
            return Err(DyadicError::DimensionMismatch {
                expected: self.w.len(),
                got: a.len(),
            });
        }
        Ok(())
    }

    /// `O(K)` evaluation of `(L a)_k`, `k = 0..=K`, written into `out`.
    ///
    /// Panics if the slice lengths differ from `K + 1`.
    pub fn apply(&self, a: &[f64], out: &mut [f64]) {
        let kmax = self.trunc_k();
        assert_eq!(a.len(), kmax + 1);
        assert_eq!(out.len(), kmax + 1);
        // Forward pass stores F_k in out.
        let mut f = CompensatedSum::new();
        out[0] = 0.0;
        for k in 1..=kmax {
            f.add((a[k] - a[k - 1]) * self.wsum[k]);
            out[k] = f.value();
        }
        // Backward pass: G_K = 0, G_{k-1} = G_k / 2 + c_k d_k.
        let mut g = 0.0;
        for k in (1..=kmax).rev() {
            out[k] -= self.w[k] * g;
            g = 0.5 * g + self.tailc[k] * (a[k] - a[k - 1]);
        }
        out[0] = -g;
    }

    /// `O(K)` evaluation of `(L a)_k - (L a)_{k-1}` for `k = 1..=K`; entry 0 is set to 0.
    ///
    /// Computed from increments without differencing two operator values.
    pub fn apply_increments(&self, a: &[f64], out: &mut [f64]) {
        let kmax = self.trunc_k();
        assert_eq!(a.len(), kmax + 1);
        assert_eq!(out.len(), kmax + 1);
        let mut g = 0.0;
        for k in (1..=kmax).rev() {
            let d = a[k] - a[k - 1];
            out[k] = d * (self.wsum[k] + self.w[k - 1] * self.tailc[k])
                - g * (self.w[k] - 0.5 * self.w[k - 1]);
            g = 0.5 * g + self.tailc[k] * d;
        }
        out[0] = 0.0;
    }

    /// Reference `O(K^2)` double loop with the closed-form plateau tail.
    pub fn apply_direct(&self, a: &[f64], out: &mut [f64]) {
        let kmax = self.trunc_k();
        assert_eq!(a.len(), kmax + 1);
        assert_eq!(out.len(), kmax + 1);
        for k in 0..=kmax {
            let mut acc = CompensatedSum::new();
            for n in 0..k {
                acc.add((a[k] - a[n]) * self.w[n]);
            }
            let pk = self.w[k];
            for n in k + 1..=kmax {
                acc.add((a[k] - a[n]) * pk * (k as f64 - n as f64).exp2());
            }
            if self.tail == Tail::Plateau {
                // sum_{n>K} 2^{k-n} = 2^{k-K}
                acc.add((a[k] - a[kmax]) * pk * (k as f64 - kmax as f64).exp2());
            }
            out[k] = acc.value();
        }
    }

    pub fn eval(&self, a: &[f64]) -> Result<Vec<f64>> {
        self.check_len(a)?;
        let mut out = vec![0.0; a.len()];
        self.apply(a, &mut out);
        Ok(out)
    }
}

fn prepare(params: &ModelParams, state: &DyadicState) -> Result<Dissipation> {
    params.validate()?;
    state.check_dim(params)?;
    Ok(Dissipation::for_params(params))
}

/// `(L^alpha a)_k` for `k = 0..=K`, production `O(K)` path.
pub fn dissipation(params: &ModelParams, state: &DyadicState) -> Result<Vec<f64>> {
    prepare(params, state)?.eval(state.values())
}

/// `(L^alpha a)_k` by direct double summation; the reference for [`dissipation`].
pub fn dissipation_direct(params: &ModelParams, state: &DyadicState) -> Result<Vec<f64>> {
    let op = prepare(params, state)?;
    let mut out = vec![0.0; state.len()];
    op.apply_direct(state.values(), &mut out);
    Ok(out)
}

/// `(L a)_k - (L a)_{k-1}` for `k >= 1` (entry 0 is 0).
pub fn dissipation_increments(params: &ModelParams, state: &DyadicState) -> Result<Vec<f64>> {
    let op = prepare(params, state)?;
    let mut out = vec![0.0; state.len()];
    op.apply_increments(state.values(), &mut out);
    Ok(out)
}

/// `(L a)_inf = sum_{n=0}^{K} (a_K - a_n) 2^{2 alpha n}`, the common value of
/// `(L a)_k` for every `k > K` under the plateau extension.
pub fn dissipation_limit(params: &ModelParams, state: &DyadicState) -> Result<f64> {
    params.validate()?;
    state.check_dim(params)?;
    if params.tail != Tail::Plateau {
        return Err(DyadicError::UnsupportedConvention);
    }
    let a = state.values();
    let ak = a[params.trunc_k];
    let mut acc = CompensatedSum::new();
    for (n, &an) in a.iter().enumerate() {
        acc.add((ak - an) * (2.0 * params.alpha * n as f64).exp2());
    }
    Ok(acc.value())
}

/// `sum_k (L a)_k 2^{-k}` over all `k >= 0`: the stored range plus the
/// closed-form contribution `S 2^{-K}` of every `k > K`. Vanishes identically.
pub fn telescoped_sum(params: &ModelParams, state: &DyadicState) -> Result<f64> {
    let limit = dissipation_limit(params, state)?;
    let la = dissipation(params, state)?;
    let mut acc = CompensatedSum::new();
    for (k, v) in la.iter().enumerate() {
        acc.add(v * (-(k as f64)).exp2());
    }
    acc.add(limit * (-(params.trunc_k as f64)).exp2());
    Ok(acc.value())
}
