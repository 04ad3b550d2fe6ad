use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};

/// Extension convention for indices beyond the truncation `K`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// `a_n = a_K` for all `n > K`; infinite tail sums are summed in closed form.
    #[default]
    Plateau,
    /// Tail sums over `n > K` are dropped. Kept for sensitivity studies.
    Zero,
}

/// Parameters of one model instance.
///
/// `alpha == 0` selects the inviscid system with `a_0` pinned at zero; any
/// positive `alpha` selects the dissipative system where `a_0` evolves.
/// `norm_s` and `delta` are diagnostic indices (the `X^s` norm recorded along
/// trajectories and the exponent of the blow-up functional `J`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub trunc_k: usize,
    pub norm_s: f64,
    pub tail: Tail,
    /// When false only the linear part `-L a` is integrated.
    pub nonlinear: bool,
    pub delta: f64,
}

impl ModelParams {
    pub const DEFAULT_NORM_S: f64 = 1.5;
    pub const DEFAULT_DELTA: f64 = 0.5;

    pub fn new(alpha: f64, trunc_k: usize) -> Result<Self> {
        let p = Self {
            alpha,
            trunc_k,
            norm_s: Self::DEFAULT_NORM_S,
            tail: Tail::Plateau,
            nonlinear: true,
            delta: Self::DEFAULT_DELTA,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn inviscid(trunc_k: usize) -> Result<Self> {
        Self::new(0.0, trunc_k)
    }

    pub fn with_norm_s(mut self, s: f64) -> Result<Self> {
        self.norm_s = s;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    /// Drops the quadratic transport term, leaving `a' = -L a`.
    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(DyadicError::Domain(format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        if self.trunc_k < 1 {
            return Err(DyadicError::Domain(format!(
                "trunc_k must be >= 1, got {}",
                self.trunc_k
            )));
        }
        if !(self.norm_s.is_finite() && self.norm_s > 0.0) {
            return Err(DyadicError::Domain(format!(
                "norm_s must be > 0, got {}",
                self.norm_s
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(DyadicError::Domain(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !self.nonlinear && self.alpha == 0.0 {
            return Err(DyadicError::Domain(
                "a linear-only model needs alpha > 0".into(),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn is_inviscid(&self) -> bool {
        self.alpha == 0.0
    }

    /// Number of stored entries, `K + 1`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.trunc_k + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_domain() {
        assert!(ModelParams::new(-0.1, 8).is_err());
        assert!(ModelParams::new(0.2, 0).is_err());
        assert!(ModelParams::new(0.2, 8).unwrap().with_norm_s(0.0).is_err());
        assert!(ModelParams::new(0.2, 8).unwrap().with_delta(1.0).is_err());
        assert!(ModelParams::new(0.0, 8).unwrap().linear_only().validate().is_err());
    }

    #[test]
    fn plateau_is_default() {
        let p = ModelParams::new(0.25, 4).unwrap();
        assert_eq!(p.tail, Tail::Plateau);
        assert!(p.nonlinear);
        assert_eq!(p.dim(), 5);
    }
}
