use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};
use crate::model::DyadicState;
use crate::sum::CompensatedSum;

/// Split of `1..=K` into good indices (`a_k - a_{k-1} >= c (a_K - a_k)`) and
/// bad ones, with the two weighted sums they relate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodBadDecomposition {
    pub c: f64,
    pub good_indices: Vec<usize>,
    pub bad_indices: Vec<usize>,
    /// `sum_k (a_k - a_{k-1})^2 2^{k(delta+1)}`
    pub lhs: f64,
    /// `sum_k (a_K - a_k)^2 2^{k(delta+1)}`
    pub rhs: f64,
    /// `lhs / rhs`, `+inf` when `rhs == 0`.
    pub ratio: f64,
}

pub fn good_bad(state: &DyadicState, delta: f64, c: f64) -> Result<GoodBadDecomposition> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(DyadicError::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(c > 0.0) || (1.0 + c).powi(-2) * (delta + 1.0).exp2() <= 1.0 {
        return Err(DyadicError::Domain(format!(
            "c = {c} must be positive with (1 + c)^-2 2^(delta + 1) > 1"
        )));
    }
    let a = state.values();
    if let Some(k) = (1..a.len()).find(|&k| a[k] < a[k - 1]) {
        return Err(DyadicError::Domain(format!("state decreases at index {k}")));
    }
    let ak = a[a.len() - 1];
    let mut good = Vec::new();
    let mut bad = Vec::new();
    let mut lhs = CompensatedSum::new();
    let mut rhs = CompensatedSum::new();
    for k in 1..a.len() {
        let d = a[k] - a[k - 1];
        let gap = ak - a[k];
        let w = (k as f64 * (delta + 1.0)).exp2();
        lhs.add(d * d * w);
        rhs.add(gap * gap * w);
        if d >= c * gap {
            good.push(k);
        } else {
            bad.push(k);
        }
    }
    let (lhs, rhs) = (lhs.value(), rhs.value());
    Ok(GoodBadDecomposition {
        c,
        good_indices: good,
        bad_indices: bad,
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{c0_candidate, default_goodbad_c};
    use proptest::prelude::*;

    #[test]
    fn geometric_deficit_is_all_good() {
        let a: Vec<f64> = (0..=12).map(|k| 1.0 - (-(k as f64)).exp2()).collect();
        let d = good_bad(&DyadicState::new(0.0, a).unwrap(), 0.5, 0.5).unwrap();
        assert_eq!(d.good_indices, (1..=12).collect::<Vec<_>>());
        assert!(d.bad_indices.is_empty());
    }

    #[test]
    fn flat_tail_gives_infinite_ratio() {
        let d = good_bad(&DyadicState::new(0.0, vec![0.0, 1.0, 1.0, 1.0]).unwrap(), 0.5, 0.5).unwrap();
        assert_eq!(d.rhs, 0.0);
        assert_eq!(d.ratio, f64::INFINITY);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = DyadicState::new(0.0, vec![0.0, 1.0, 0.5]).unwrap();
        assert!(good_bad(&s, 0.5, 0.5).is_err());
        let s = DyadicState::new(0.0, vec![0.0, 0.5, 1.0]).unwrap();
        assert!(good_bad(&s, 0.5, 1.0).is_err());
        assert!(good_bad(&s, 1.5, 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn ratio_exceeds_candidate(incs in proptest::collection::vec(0.0f64..1.0, 2..30)) {
            let mut a = vec![0.0];
            for d in incs {
                let last = *a.last().unwrap();
                a.push(last + d);
            }
            let delta = 0.5;
            let c = default_goodbad_c(delta);
            let kmax = a.len() - 1;
            let d = good_bad(&DyadicState::new(0.0, a).unwrap(), delta, c).unwrap();
            let mut all: Vec<usize> = d.good_indices.iter().chain(&d.bad_indices).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (1..=kmax).collect::<Vec<_>>());
            prop_assert!(d.lhs >= 0.0 && d.rhs >= 0.0);
            if d.rhs > 0.0 {
                prop_assert!(d.ratio >= c0_candidate(delta, c));
            }
        }
    }
}
