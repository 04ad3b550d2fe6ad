use crate::error::{DyadicError, Result};

/// Threshold constant `c_s = (3/4) (2^s - 1)^{-1} (1 - 1/(2^{s+1} - 1))`.
///
/// Exceeds 1 for small `s` (about `s < 0.38`); lemma-level checks only use `s >= 1`.
pub fn cs_constant(s: f64) -> f64 {
    0.75 / (s.exp2() - 1.0) * (1.0 - 1.0 / ((s + 1.0).exp2() - 1.0))
}

/// Coercivity constant `C(alpha) = 2^{-2 alpha} / (2^{2 alpha} - 1)`, chosen so that
/// `(2^{2 alpha (k-1)} - 1) / (2^{2 alpha} - 1) = C(alpha) (2^{2 alpha k} - 2^{2 alpha})`.
///
/// Defined for `0 < alpha < 1/2`; it blows up like `1 / (2 alpha ln 2)` as `alpha -> 0+`.
pub fn coercivity_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(DyadicError::Domain(format!(
            "coercivity constant needs 0 < alpha < 1/2, got {alpha}"
        )));
    }
    let q = (2.0 * alpha).exp2();
    Ok(1.0 / (q * (q - 1.0)))
}

/// Default good/bad threshold: the `c > 0` with `(1 + c)^2 = 0.9 * 2^{delta+1}`.
pub fn default_goodbad_c(delta: f64) -> f64 {
    (0.9 * (delta + 1.0).exp2()).sqrt() - 1.0
}

/// Conservative lower-bound candidate `min(c^2, 1 - (1+c)^2 2^{-(delta+1)})` for
/// the ratio of the two sums in the good/bad inequality. Validated empirically.
pub fn c0_candidate(delta: f64, c: f64) -> f64 {
    (c * c).min(1.0 - (1.0 + c).powi(2) * (-(delta + 1.0)).exp2())
}

/// Named constants for one `(s, alpha, delta)` choice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub c_s: f64,
    pub c_alpha: f64,
    pub delta: f64,
    pub c_goodbad: f64,
}

impl Constants {
    pub fn new(s: f64, alpha: f64, delta: f64) -> Result<Self> {
        Self::with_goodbad(s, alpha, delta, default_goodbad_c(delta))
    }

    pub fn with_goodbad(s: f64, alpha: f64, delta: f64, c_goodbad: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(DyadicError::Domain(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        if !(c_goodbad > 0.0 && (delta + 1.0).exp2() / (1.0 + c_goodbad).powi(2) > 1.0) {
            return Err(DyadicError::Domain(format!(
                "good/bad threshold {c_goodbad} violates (c+1)^-2 2^(delta+1) > 1"
            )));
        }
        Ok(Self {
            c_s: cs_constant(s),
            c_alpha: coercivity_constant(alpha)?,
            delta,
            c_goodbad,
        })
    }

    pub fn c0(&self) -> f64 {
        c0_candidate(self.delta, self.c_goodbad)
    }
}
