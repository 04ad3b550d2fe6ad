use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use crate::error::{DyadicError, Result};
use crate::sum::CompensatedSum;

/// The truncated sequence `a_0 ..= a_K` at time `t`.
///
/// Entry `a_k` stands for the profile value at the dyadic point `2^-k`.
/// All entries are finite; monotonicity is checked by the analysis layer,
/// never enforced here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicState {
    pub t: f64,
    a: Vec<f64>,
}

impl DyadicState {
    pub fn new(t: f64, a: Vec<f64>) -> Result<Self> {
        if a.len() < 2 {
            return Err(DyadicError::InvalidInput(format!(
                "a state needs at least two entries, got {}",
                a.len()
            )));
        }
        if !t.is_finite() {
            return Err(DyadicError::InvalidInput(format!("non-finite time {t}")));
        }
        if let Some(index) = a.iter().position(|x| !x.is_finite()) {
            return Err(DyadicError::NonFinite { index });
        }
        Ok(Self { t, a })
    }

    /// Builds `a` from `a_0` and slopes `b_1 ..= b_K` via `a_k = a_{k-1} + b_k 2^-k`.
    pub fn from_slopes(t: f64, a0: f64, b: &[f64]) -> Result<Self> {
        let mut a = Vec::with_capacity(b.len() + 1);
        let mut acc = CompensatedSum::new();
        acc.add(a0);
        a.push(a0);
        for (j, &bk) in b.iter().enumerate() {
            acc.add(bk * (-((j + 1) as f64)).exp2());
            a.push(acc.value());
        }
        Self::new(t, a)
    }

    pub fn constant(t: f64, trunc_k: usize, c: f64) -> Result<Self> {
        Self::new(t, vec![c; trunc_k + 1])
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.a
    }

    pub fn into_values(self) -> Vec<f64> {
        self.a
    }

    #[inline]
    pub fn trunc_k(&self) -> usize {
        self.a.len() - 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.a.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `max_k a_k`.
    pub fn sup(&self) -> f64 {
        self.a.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same values at a different time.
    pub fn at_time(&self, t: f64) -> Self {
        Self {
            t,
            a: self.a.clone(),
        }
    }

    pub fn check_dim(&self, params: &ModelParams) -> Result<()> {
        if self.a.len() != params.dim() {
            return Err(DyadicError::DimensionMismatch {
                expected: params.dim(),
                got: self.a.len(),
            });
        }
        Ok(())
    }

    /// Non-negative and non-decreasing in `k`.
    pub fn is_admissible(&self) -> bool {
        self.a[0] >= 0.0 && self.a.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Slopes `b_k = (a_k - a_{k-1}) 2^k`, stored with the convention `b_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeVector(pub(crate) Vec<f64>);

impl SlopeVector {
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Weighted slopes `b_{k,s} = (a_k - a_{k-1}) 2^{sk}`, with `bs_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSlopeVector {
    pub s: f64,
    pub(crate) bs: Vec<f64>,
}

impl WeightedSlopeVector {
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.bs
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.bs[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let err = DyadicState::new(0.0, vec![0.0, f64::NAN, 1.0]).unwrap_err();
        assert!(matches!(err, DyadicError::NonFinite { index: 1 }));
        assert!(DyadicState::new(0.0, vec![0.0]).is_err());
    }

    #[test]
    fn slope_reconstruction() {
        let s = DyadicState::from_slopes(0.0, 0.0, &[1.0, 1.0]).unwrap();
        assert_eq!(s.values(), &[0.0, 0.5, 0.75]);
        assert!(s.is_admissible());
        assert!(!DyadicState::new(0.0, vec![0.0, 1.0, 0.5]).unwrap().is_admissible());
    }

    #[test]
    fn dimension_check() {
        let p = ModelParams::new(0.25, 3).unwrap();
        let s = DyadicState::new(0.0, vec![0.0; 3]).unwrap();
        assert!(matches!(
            s.check_dim(&p),
            Err(DyadicError::DimensionMismatch { expected: 4, got: 3 })
        ));
    }
}
