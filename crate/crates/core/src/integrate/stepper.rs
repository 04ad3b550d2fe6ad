use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::controls::{Scheme, StepControls};
use super::linear::{from_slope, to_slope, LinearFlow};
use crate::error::{DyadicError, Result};
use crate::model::{DyadicState, ModelParams, Rhs};

/// Result of one accepted step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutput {
    pub state: DyadicState,
    /// Normalised error of the accepted step (`<= 1`); zero for the fixed-step scheme.
    pub error_estimate: f64,
    /// Step actually taken.
    pub dt_used: f64,
    /// Suggested next step.
    pub dt_next: f64,
}

// Dormand-Prince 5(4); the system is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_ALPHA: f64 = 0.17;
const PI_BETA: f64 = 0.04;

/// Propagators `e^{G h/4}`, `e^{G h/2}`, `e^{G h}`.
type Props = Arc<[DMatrix<f64>; 3]>;
const PROP_CACHE_LIMIT: usize = 128;

/// Stateful single-trajectory stepper. Holds the scheme workspace, the PI
/// controller memory and (for the fixed-step scheme) the running compensation
/// of the state sum.
#[derive(Clone, Debug)]
pub struct Integrator {
    rhs: Rhs,
    controls: StepControls,
    flow: Option<LinearFlow>,
    nonlinear: bool,
    props: HashMap<u64, Props>,
    err_prev: f64,
    comp: Vec<f64>,
    last_out: Vec<f64>,
    stages: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl Integrator {
    pub fn new(params: &ModelParams, controls: &StepControls) -> Result<Self> {
        params.validate()?;
        controls.validate()?;
        let dim = params.dim();
        let flow = match controls.scheme {
            Scheme::DuhamelImex => Some(LinearFlow::new(params)?),
            _ => None,
        };
        Ok(Self {
            rhs: Rhs::new(params)?,
            controls: *controls,
            flow,
            nonlinear: params.nonlinear,
            props: HashMap::new(),
            err_prev: 1e-4,
            comp: vec![0.0; dim],
            last_out: Vec::new(),
            stages: vec![vec![0.0; dim]; 7],
            tmp: vec![0.0; dim],
        })
    }

    pub fn controls(&self) -> &StepControls {
        &self.controls
    }

    pub fn params(&self) -> &ModelParams {
        self.rhs.params()
    }

    /// Takes one accepted step starting from `state` with trial step `dt`,
    /// shrinking on rejection. The fixed-step scheme always accepts `dt`.
    pub fn advance(&mut self, state: &DyadicState, dt: f64) -> Result<StepOutput> {
        state.check_dim(self.params())?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(DyadicError::Domain(format!("dt must be > 0, got {dt}")));
        }
        let a = state.values();
        if self.controls.scheme == Scheme::ReferenceFixedRk4 {
            let next = self.rk4_compensated(a, dt);
            if next.iter().any(|x| !x.is_finite()) {
                return Err(DyadicError::Escape { t: state.t + dt });
            }
            return Ok(StepOutput {
                state: DyadicState::new(state.t + dt, next)?,
                error_estimate: 0.0,
                dt_used: dt,
                dt_next: dt,
            });
        }

        let mut h = dt;
        let mut rejected = false;
        loop {
            if h < self.controls.dt_min {
                return Err(DyadicError::StepUnderflow { t: state.t, dt: h });
            }
            let (next, err) = match self.controls.scheme {
                Scheme::ExplicitAdaptive => self.dopri(a, h),
                _ => self.lawson_doubled(a, h),
            };
            if err.is_finite() && err <= 1.0 {
                let mut fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    SAFETY * err.powf(-PI_ALPHA) * self.err_prev.powf(PI_BETA)
                };
                fac = fac.clamp(FAC_MIN, FAC_MAX);
                if rejected {
                    fac = fac.min(1.0);
                }
                self.err_prev = err.max(1e-4);
                let mut dt_next = h * fac;
                if self.controls.scheme == Scheme::DuhamelImex {
                    dt_next = quantize(dt_next);
                }
                return Ok(StepOutput {
                    state: DyadicState::new(state.t + h, next)?,
                    error_estimate: err,
                    dt_used: h,
                    dt_next,
                });
            }
            rejected = true;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0)
            } else {
                FAC_MIN
            };
            h *= fac;
        }
    }

    fn err_norm(&self, y: &[f64], ynew: &[f64], diff: impl Fn(usize) -> f64) -> f64 {
        let (atol, rtol) = (self.controls.abs_tol, self.controls.rel_tol);
        let mut worst = 0.0_f64;
        for i in 0..y.len() {
            let sc = atol + rtol * y[i].abs().max(ynew[i].abs());
            let e = diff(i).abs() / sc;
            if !e.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(e);
        }
        worst
    }

    fn dopri(&mut self, a: &[f64], h: f64) -> (Vec<f64>, f64) {
        let n = a.len();
        let mut ks = std::mem::take(&mut self.stages);
        self.rhs.eval_into(a, &mut ks[0]);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, k) in ks.iter().enumerate().take(s) {
                    acc += A[s][j] * k[i];
                }
                self.tmp[i] = a[i] + h * acc;
            }
            self.rhs.eval_into(&self.tmp, &mut ks[s]);
        }
        // Stage 7 is evaluated at the 5th-order solution, which is tmp.
        let next = self.tmp.clone();
        let err = self.err_norm(a, &next, |i| {
            let mut e = 0.0;
            for (j, k) in ks.iter().enumerate() {
                e += E[j] * k[i];
            }
            h * e
        });
        self.stages = ks;
        (next, err)
    }

    fn rk4_compensated(&mut self, a: &[f64], h: f64) -> Vec<f64> {
        if self.last_out.as_slice() != a {
            self.comp.iter_mut().for_each(|c| *c = 0.0);
        }
        let n = a.len();
        let mut ks = std::mem::take(&mut self.stages);
        self.rhs.eval_into(a, &mut ks[0]);
        for (s, frac) in [(1, 0.5), (2, 0.5), (3, 1.0)] {
            for i in 0..n {
                self.tmp[i] = a[i] + frac * h * ks[s - 1][i];
            }
            self.rhs.eval_into(&self.tmp, &mut ks[s]);
        }
        let mut next = a.to_vec();
        for i in 0..n {
            let inc = h / 6.0 * (ks[0][i] + 2.0 * (ks[1][i] + ks[2][i]) + ks[3][i]);
            // Kahan update carried across steps.
            let y = inc - self.comp[i];
            let t = next[i] + y;
            self.comp[i] = (t - next[i]) - y;
            next[i] = t;
        }
        self.stages = ks;
        self.last_out.clear();
        self.last_out.extend_from_slice(&next);
        next
    }

    fn propagators(&mut self, h: f64) -> Props {
        if let Some(p) = self.props.get(&h.to_bits()) {
            return Arc::clone(p);
        }
        let flow = self.flow.as_ref().expect("flow exists for the integrating-factor scheme");
        let e4 = flow.propagator(0.25 * h);
        let e2 = &e4 * &e4;
        let e1 = &e2 * &e2;
        if self.props.len() >= PROP_CACHE_LIMIT {
            self.props.clear();
        }
        let p: Props = Arc::new([e4, e2, e1]);
        self.props.insert(h.to_bits(), Arc::clone(&p));
        p
    }

    /// Full step against two half steps; returns the two-half-step result.
    fn lawson_doubled(&mut self, a: &[f64], h: f64) -> (Vec<f64>, f64) {
        let p = self.propagators(h);
        let y = to_slope(a);
        let full = self.lawson(&y, h, &p[1], &p[2]);
        let mid = self.lawson(&y, 0.5 * h, &p[0], &p[1]);
        let fine = self.lawson(&mid, 0.5 * h, &p[0], &p[1]);
        if fine.iter().chain(&full).any(|x| !x.is_finite()) {
            return (from_slope(&fine), f64::INFINITY);
        }
        let err = self.err_norm(&y, &fine, |i| (fine[i] - full[i]) / 15.0);
        (from_slope(&fine), err)
    }

    fn nonlinear_term(&self, y: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(y.len());
        if self.nonlinear {
            for k in 1..y.len() {
                let prev = if k >= 2 { y[k - 1] } else { 0.0 };
                out[k] = -y[k] * y[k] + 2.0 * prev * prev;
            }
        }
        out
    }

    /// One Lawson RK4 step in slope variables for `y' = G y + N(y)`.
    fn lawson(&self, y: &[f64], h: f64, e_half: &DMatrix<f64>, e_full: &DMatrix<f64>) -> Vec<f64> {
        let yv = DVector::from_column_slice(y);
        let ey = e_full * &yv;
        if !self.nonlinear {
            return ey.as_slice().to_vec();
        }
        let k1 = self.nonlinear_term(y);
        let eh_y = e_half * &yv;
        let k2 = self.nonlinear_term((e_half * (&yv + &k1 * (0.5 * h))).as_slice());
        let k3 = self.nonlinear_term((&eh_y + &k2 * (0.5 * h)).as_slice());
        let k4 = self.nonlinear_term((&ey + e_half * &k3 * h).as_slice());
        let combo = e_full * k1 + e_half * ((k2 + k3) * 2.0) + k4;
        (ey + combo * (h / 6.0)).as_slice().to_vec()
    }
}

/// Rounds a proposed step down to the ladder `2^{j/8}` so propagators can be
/// reused across steps.
fn quantize(h: f64) -> f64 {
    let j = (8.0 * h.log2()).floor();
    (j / 8.0).exp2()
}

/// One accepted step of the configured scheme from `state` with trial step `dt`.
pub fn step(
    params: &ModelParams,
    state: &DyadicState,
    controls: &StepControls,
    dt: f64,
) -> Result<StepOutput> {
    Integrator::new(params, controls)?.advance(state, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::linear_semigroup;

    fn controls(p: &ModelParams, scheme: Scheme) -> StepControls {
        StepControls::default_for(p)
            .with_scheme(scheme)
            .with_tolerances(1e-10, 1e-13)
    }

    const ALL: [Scheme; 3] = [
        Scheme::ExplicitAdaptive,
        Scheme::DuhamelImex,
        Scheme::ReferenceFixedRk4,
    ];

    #[test]
    fn constant_state_is_fixed() {
        let p = ModelParams::new(0.3, 8).unwrap();
        let s = DyadicState::constant(0.0, 8, 0.7).unwrap();
        for scheme in ALL {
            let out = step(&p, &s, &controls(&p, scheme), 1e-3).unwrap();
            assert_eq!(out.error_estimate, 0.0, "{scheme:?}");
            for x in out.state.values() {
                assert!((x - 0.7).abs() < 1e-15, "{scheme:?}: {x}");
            }
        }
    }

    #[test]
    fn single_mode_riccati() {
        let p = ModelParams::inviscid(1).unwrap();
        let s = DyadicState::new(0.0, vec![0.0, 1.0]).unwrap();
        for scheme in ALL {
            let out = step(&p, &s, &controls(&p, scheme), 1e-3).unwrap();
            let t = out.dt_used;
            let exact = 1.0 / (1.0 + 2.0 * t);
            let got = out.state.values()[1];
            assert!(((got - exact) / exact).abs() < 1e-10, "{scheme:?}");
            assert_eq!(out.state.values()[0], 0.0);
        }
    }

    #[test]
    fn linear_only_matches_semigroup() {
        let p = ModelParams::new(0.3, 8).unwrap().linear_only();
        let a: Vec<f64> = (0..=8).map(|k| 1.0 - (-(k as f64)).exp2()).collect();
        let s = DyadicState::new(0.0, a).unwrap();
        let want = linear_semigroup(&p, &s, 1e-3).unwrap();
        for scheme in ALL {
            let mut c = controls(&p, scheme);
            c.dt_init = 1e-4;
            let mut it = Integrator::new(&p, &c).unwrap();
            let mut cur = s.clone();
            while cur.t < 1e-3 - 1e-15 {
                let dt = (1e-3 - cur.t).min(1e-4);
                cur = it.advance(&cur, dt).unwrap().state;
            }
            for (x, y) in cur.values().iter().zip(want.values()) {
                assert!((x - y).abs() < 1e-8, "{scheme:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn underflow_and_bad_dt() {
        let p = ModelParams::inviscid(4).unwrap();
        let s = DyadicState::new(0.0, vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut c = controls(&p, Scheme::ExplicitAdaptive);
        c.dt_min = 0.5;
        c.dt_init = 1.0;
        assert!(matches!(
            step(&p, &s, &c, 1.0),
            Err(DyadicError::StepUnderflow { .. })
        ));
        assert!(step(&p, &s, &controls(&p, Scheme::ExplicitAdaptive), -1.0).is_err());
    }

    #[test]
    fn quantize_ladder() {
        assert_eq!(quantize(1.0), 1.0);
        assert_eq!(quantize(0.5), 0.5);
        let q = quantize(0.3);
        assert!(q <= 0.3 && q > 0.3 / 2f64.powf(0.125));
    }
}
