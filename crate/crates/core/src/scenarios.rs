//! Initial-data generators.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};
use crate::model::DyadicState;

/// Initial-data family of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Scenario {
    /// Samples of the bump `(1 - x^2)^2` as a deficit profile, see [`gen_bump`].
    Bump,
    /// Slopes rising geometrically to a front at `k0`, then decaying; see [`gen_front`].
    Front {
        k0: usize,
        q: f64,
        r: f64,
        /// Multiplies every slope.
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// Partial geometric sums, see [`gen_geometric`].
    Geometric { rate: f64 },
    /// Explicit values `a_0 ..= a_K`.
    Custom { values: Vec<f64> },
}

fn unit() -> f64 {
    1.0
}

impl Scenario {
    pub fn build(&self, trunc_k: usize) -> Result<DyadicState> {
        match self {
            Self::Bump => gen_bump(trunc_k),
            Self::Front { k0, q, r, amplitude } => gen_front_scaled(trunc_k, *k0, *q, *r, *amplitude),
            Self::Geometric { rate } => gen_geometric(trunc_k, *rate),
            Self::Custom { values } => {
                if values.len() != trunc_k + 1 {
                    return Err(DyadicError::DimensionMismatch {
                        expected: trunc_k + 1,
                        got: values.len(),
                    });
                }
                DyadicState::new(0.0, values.clone())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bump => "bump",
            Self::Front { .. } => "front",
            Self::Geometric { .. } => "geometric",
            Self::Custom { .. } => "custom",
        }
    }
}

fn check_k(trunc_k: usize) -> Result<()> {
    if trunc_k < 2 {
        return Err(DyadicError::Domain(format!("K must be >= 2, got {trunc_k}")));
    }
    Ok(())
}

/// `a_k = theta(2^-k)` for `theta(x) = (1 - x^2)^2`, i.e. `a_k = (1 - 4^-k)^2`.
///
/// The bump `(1 - x^2)^2` read as a deficit from its peak value: `a_0 = 0`,
/// strictly increasing, and `a_K >= 1 - 1e-6` once `K >= 12`.
pub fn gen_bump(trunc_k: usize) -> Result<DyadicState> {
    check_k(trunc_k)?;
    let a = (0..=trunc_k)
        .map(|k| {
            let x2 = (-2.0 * k as f64).exp2();
            (1.0 - x2) * (1.0 - x2)
        })
        .collect();
    DyadicState::new(0.0, a)
}

/// Slopes `b_k = q^k` for `k <= k0` and `q^{k0} r^{k-k0}` beyond, with `a_0 = 0`.
///
/// Requires `2 <= k0 < K`, `1 < q < sqrt(2)` and `0 < r < 1`, so consecutive
/// ratios are `q` up to the front and `r` after it.
pub fn gen_front(trunc_k: usize, k0: usize, q: f64, r: f64) -> Result<DyadicState> {
    gen_front_scaled(trunc_k, k0, q, r, 1.0)
}

/// [`gen_front`] with every slope multiplied by `amplitude > 0`.
pub fn gen_front_scaled(trunc_k: usize, k0: usize, q: f64, r: f64, amplitude: f64) -> Result<DyadicState> {
    check_k(trunc_k)?;
    if !(2 <= k0 && k0 < trunc_k) {
        return Err(DyadicError::Domain(format!("need 2 <= k0 < K, got k0 = {k0}, K = {trunc_k}")));
    }
    if !(q > 1.0 && q < SQRT_2) {
        return Err(DyadicError::Domain(format!("need 1 < q < sqrt(2), got {q}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(DyadicError::Domain(format!("need 0 < r < 1, got {r}")));
    }
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(DyadicError::Domain(format!("amplitude must be > 0, got {amplitude}")));
    }
    let peak = q.powi(k0 as i32);
    let b: Vec<f64> = (1..=trunc_k)
        .map(|k| {
            let v = if k <= k0 {
                q.powi(k as i32)
            } else {
                peak * r.powi((k - k0) as i32)
            };
            amplitude * v
        })
        .collect();
    DyadicState::from_slopes(0.0, 0.0, &b)
}

/// `a_k = (1 - rate^k) / (1 - rate)` rescaled so that `a_K = 1`.
pub fn gen_geometric(trunc_k: usize, rate: f64) -> Result<DyadicState> {
    check_k(trunc_k)?;
    if !(rate > 0.0 && rate < 1.0) {
        return Err(DyadicError::Domain(format!("need 0 < rate < 1, got {rate}")));
    }
    let raw: Vec<f64> = (0..=trunc_k)
        .map(|k| (1.0 - rate.powi(k as i32)) / (1.0 - rate))
        .collect();
    let top = raw[trunc_k];
    DyadicState::new(0.0, raw.into_iter().map(|x| x / top).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_monotone_nonneg, check_sqrt2_structure, front_index};
    use crate::integrate::{Termination, Trajectory};
    use crate::model::{slopes, ModelParams};
    use proptest::prelude::*;

    #[test]
    fn bump_values() {
        let s = gen_bump(12).unwrap();
        let a = s.values();
        assert_eq!(a[0], 0.0);
        assert_eq!(a[1], 0.5625);
        assert!(a.windows(2).all(|w| w[1] > w[0]));
        assert!(a[12] >= 1.0 - 1e-6 && a[12] < 1.0);
        assert!(gen_bump(1).is_err());
    }

    #[test]
    fn front_example() {
        let s = gen_front(6, 3, 1.3, 0.5).unwrap();
        let b = slopes(&s);
        let want = [0.0, 1.3, 1.69, 2.197, 1.0985, 0.54925, 0.274625];
        for (got, w) in b.values().iter().zip(want) {
            assert!((got - w).abs() < 1e-12, "{got} vs {w}");
        }
        assert_eq!(front_index(&s), Some(3));
        assert!(check_monotone_nonneg(&s).passed);
        for bad in [(6, 1, 1.3, 0.5), (6, 6, 1.3, 0.5), (6, 3, 1.5, 0.5), (6, 3, 1.3, 1.0)] {
            assert!(gen_front(bad.0, bad.1, bad.2, bad.3).is_err());
        }
    }

    #[test]
    fn geometric_example() {
        let s = gen_geometric(3, 0.5).unwrap();
        for (got, w) in s.values().iter().zip([0.0, 1.0, 1.5, 1.75]) {
            assert!((got - w / 1.75).abs() < 1e-15);
        }
        let s = gen_geometric(4, 1e-12).unwrap();
        assert!(s.values()[1..].iter().all(|&x| (x - 1.0).abs() < 1e-11));
    }

    #[test]
    fn custom_checks_length() {
        let sc = Scenario::Custom { values: vec![0.0, 1.0] };
        assert!(sc.build(2).is_err());
        assert_eq!(sc.build(1).unwrap().values(), &[0.0, 1.0]);
    }

    proptest! {
        #[test]
        fn front_data_is_structured(
            k in 4usize..24,
            k0_frac in 0.0f64..1.0,
            q in 1.001f64..1.414,
            r in 0.01f64..0.99,
        ) {
            let k0 = 2 + ((k - 3) as f64 * k0_frac) as usize;
            let s = gen_front(k, k0, q, r).unwrap();
            prop_assert!(check_monotone_nonneg(&s).passed);
            let p = ModelParams::new(0.3, k).unwrap();
            let tr = Trajectory::from_states(&p, vec![s], Termination::ReachedTEnd).unwrap();
            prop_assert!(check_sqrt2_structure(&tr).passed);
        }

        #[test]
        fn generators_are_admissible(k in 2usize..40, rate in 0.01f64..0.99) {
            prop_assert!(check_monotone_nonneg(&gen_bump(k).unwrap()).passed);
            let g = gen_geometric(k, rate).unwrap();
            prop_assert!(check_monotone_nonneg(&g).passed);
            prop_assert_eq!(g.values()[0], 0.0);
        }
    }
}
