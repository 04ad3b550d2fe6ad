//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use dyadic_core::analysis::{
    check_coercivity, check_holder_half, check_max_principle, check_monotone_trajectory,
    check_sqrt2_structure, good_bad, riccati_inequality_check,
    structural_front_series, BlowupDiagnostics,
};
use dyadic_core::integrate::{integrate, linear_semigroup, Scheme, StepControls, Termination};
use dyadic_core::io::RunConfig;
use dyadic_core::model::{
    c0_candidate, cs_constant, default_goodbad_c, dissipation, dissipation_direct,
    telescoped_sum, weighted_slopes, xs_norm,
};
use dyadic_core::scenarios::{gen_bump, gen_front, gen_geometric, Scenario};
use dyadic_core::sweep::{run_sweep, SweepSpec};
use dyadic_core::{DyadicState, ModelParams};

const ALPHAS: [f64; 5] = [0.05, 0.15, 0.25, 0.35, 0.45];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// Nondecreasing state with `a_0 = 0`, random increments (about a quarter of them zero).
fn random_monotone(rng: &mut StdRng, k: usize) -> DyadicState {
    let mut a = Vec::with_capacity(k + 1);
    let mut acc = 0.0;
    a.push(0.0);
    for _ in 0..k {
        if rng.random::<f64>() > 0.25 {
            acc += rng.random::<f64>();
        }
        a.push(acc);
    }
    DyadicState::new(0.0, a).unwrap()
}

fn operator_agreement() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0_f64;
    for i in 0..500 {
        let k = if i % 25 == 0 { 1024 } else { rng.random_range(2..=1024) };
        let alpha = ALPHAS[i % ALPHAS.len()];
        let p = ModelParams::new(alpha, k).unwrap();
        let s = random_monotone(&mut rng, k);
        let fast = dissipation(&p, &s).unwrap();
        let direct = dissipation_direct(&p, &s).unwrap();
        let scale = direct.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let err = fast.iter().zip(&direct).map(|(f, d)| (f - d).abs()).fold(0.0, f64::max);
        worst = worst.max(err / scale);
    }
    outcome(worst <= 1e-12, format!("max relative deviation {worst:.3e} (tol 1e-12)"))
}

fn telescoping() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..200 {
        let k = rng.random_range(2..=256);
        let p = ModelParams::new(ALPHAS[i % ALPHAS.len()], k).unwrap();
        let s = random_monotone(&mut rng, k);
        let sum = telescoped_sum(&p, &s).unwrap();
        worst = worst.max(sum.abs() / (1.0 + xs_norm(&s, 1.0)));
    }
    let example = DyadicState::new(0.0, vec![0.0, 1.0, 1.0]).unwrap();
    let exact = ALPHAS
        .iter()
        .all(|&a| telescoped_sum(&ModelParams::new(a, 2).unwrap(), &example).unwrap() == 0.0);
    outcome(
        worst <= 1e-10 && exact,
        format!("max |sum| / (1 + |a|_X1) = {worst:.3e} (tol 1e-10); [0,1,1] exactly zero: {exact}"),
    )
}

/// Small random increments plus one dominant jump at `k* >= 2`.
fn spiked_state(rng: &mut StdRng, k: usize) -> DyadicState {
    let kstar = rng.random_range(2..=k);
    let mut a = vec![0.0; k + 1];
    for j in 1..=k {
        let mut inc = 1e-3 * rng.random::<f64>() * (-(j as f64)).exp2();
        if j == kstar {
            inc += 0.5 + rng.random::<f64>();
        }
        a[j] = a[j - 1] + inc;
    }
    DyadicState::new(0.0, a).unwrap()
}

fn coercivity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = f64::INFINITY;
    let mut checked = 0usize;
    let mut passed = true;
    for i in 0..200 {
        let s = if i % 2 == 0 { 1.0 } else { 1.5 };
        let k = rng.random_range(4..=40);
        let alpha = ALPHAS[(i / 2) % ALPHAS.len()];
        let p = ModelParams::new(alpha, k).unwrap();
        let st = spiked_state(&mut rng, k);
        let bs = weighted_slopes(&st, s);
        let thr = cs_constant(s) * xs_norm(&st, s);
        if !(2..=k).any(|j| bs.get(j) > thr) {
            return outcome(false, format!("state {i} is not engineered: no b_(k,s) above threshold"));
        }
        let rep = check_coercivity(&p, &st, s).unwrap();
        checked += k - 1 - rep.skipped;
        worst = worst.min(rep.worst_margin);
        passed &= rep.passed;
    }
    outcome(passed, format!("{checked} indices checked, worst slack {worst:.3e} (tol -1e-10)"))
}

fn contraction() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let times = [0.0, 1e-3, 1e-2, 0.1, 0.3, 1.0, 2.0, 5.0, 10.0];
    let mut worst = f64::NEG_INFINITY;
    let mut runs = 0;
    for _ in 0..50 {
        let k = rng.random_range(4..=16);
        let st = random_monotone(&mut rng, k);
        for s in [1.0, 1.5, 2.0] {
            for alpha in [0.15, 0.35] {
                let p = ModelParams::new(alpha, k).unwrap().with_norm_s(s).unwrap();
                let norms: Vec<f64> = times
                    .iter()
                    .map(|&t| xs_norm(&linear_semigroup(&p, &st, t).unwrap(), s))
                    .collect();
                for w in norms.windows(2) {
                    worst = worst.max((w[1] - w[0]) / norms[0]);
                }
                runs += 1;
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{runs} runs, max relative norm increase {worst:.3e} (slack 1e-9)"),
    )
}

fn preservation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut failures = Vec::new();
    for i in 0..20 {
        let k = 8 + (i % 9);
        let alpha = 0.05 + 0.4 * (i as f64) / 19.0;
        let st = match i % 4 {
            0 => gen_bump(k).unwrap(),
            1 => gen_front(k, 3 + i % 4, 1.3, 0.6).unwrap(),
            2 => gen_geometric(k, 0.3 + 0.03 * i as f64).unwrap(),
            _ => random_monotone(&mut rng, k),
        };
        let p = ModelParams::new(alpha, k).unwrap();
        let c = StepControls::default_for(&p).with_record_every(1e-2);
        let tr = integrate(&p, &st, 1.0, &c).unwrap();
        let mono = check_monotone_trajectory(&tr);
        let maxp = check_max_principle(&tr).unwrap();
        if tr.termination != Termination::ReachedTEnd || !mono.passed || !maxp.passed {
            failures.push(format!("run {i} ({:?}, {}, {})", tr.termination, mono.worst_margin, maxp.worst_margin));
        }
    }
    let p = ModelParams::inviscid(16).unwrap();
    let bump = gen_bump(16).unwrap();
    let tr = integrate(&p, &bump, 1.0, &StepControls::default_for(&p).with_record_every(1e-2)).unwrap();
    let sup0 = bump.sup();
    let drift = tr.samples.iter().map(|s| (s.state.sup() - sup0).abs()).fold(0.0, f64::max);
    let a0_zero = tr.samples.iter().all(|s| s.state.values()[0] == 0.0);
    let inviscid_ok = tr.termination == Termination::ReachedTEnd && drift <= 1e-8 && a0_zero;
    outcome(
        failures.is_empty() && inviscid_ok,
        format!(
            "20 dissipative runs, failures: [{}]; inviscid K=16 sup drift {drift:.3e} (tol 1e-8), a_0 = 0 throughout: {a0_zero}",
            failures.join(", ")
        ),
    )
}

/// Every nondecreasing sequence of `len` values drawn from `grid`.
fn monotone_sequences(grid: &[f64], len: usize, out: &mut Vec<Vec<f64>>) {
    fn rec(grid: &[f64], from: usize, cur: &mut Vec<f64>, len: usize, out: &mut Vec<Vec<f64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for g in from..grid.len() {
            cur.push(grid[g]);
            rec(grid, g, cur, len, out);
            cur.pop();
        }
    }
    rec(grid, 0, &mut Vec::new(), len, out);
}

fn goodbad_and_identity() -> Outcome {
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut seqs = Vec::new();
    for len in 2..=12 {
        monotone_sequences(&grid, len, &mut seqs);
    }
    let mut worst = f64::INFINITY;
    let mut counted = 0usize;
    for delta in [0.25, 0.5, 0.75] {
        let c = default_goodbad_c(delta);
        let c0 = c0_candidate(delta, c);
        for a in &seqs {
            let d = good_bad(&DyadicState::new(0.0, a.clone()).unwrap(), delta, c).unwrap();
            if d.rhs > 0.0 {
                counted += 1;
                worst = worst.min(d.ratio / c0);
            }
        }
    }
    let exhaustive_ok = worst >= 1.0 - 1e-12;

    let p = ModelParams::inviscid(12).unwrap();
    let c = StepControls::default_for(&p).with_record_every(1e-4).with_tolerances(1e-11, 1e-14);
    let tr = integrate(&p, &gen_bump(12).unwrap(), 1.5, &c).unwrap();
    let rep = riccati_inequality_check(&tr, 0.5).unwrap();
    let identity_ok = tr.termination == Termination::ReachedTEnd && rep.worst_margin >= -1e-4;
    outcome(
        exhaustive_ok && identity_ok,
        format!(
            "{counted} instances, min ratio / C0 = {worst:.6}; Riccati identity defect {:.3e} (tol 1e-4)",
            -rep.worst_margin
        ),
    )
}

fn inviscid_blowup() -> Outcome {
    let mut ts = Vec::new();
    let mut norms = Vec::new();
    for k in [12, 16, 20] {
        let p = ModelParams::inviscid(k).unwrap();
        let c = StepControls::default_for(&p).with_record_every(1e-3);
        let tr = integrate(&p, &gen_bump(k).unwrap(), 2.5, &c).unwrap();
        let bd = BlowupDiagnostics::from_trajectory(&tr, 0.5).unwrap();
        ts.push(bd.riccati_t);
        norms.push(tr.max_xs_norm());
    }
    let finite: Vec<f64> = ts.iter().flatten().copied().filter(|t| t.is_finite()).collect();
    let spread = if finite.len() == 3 {
        let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = finite.iter().copied().fold(0.0, f64::max);
        (hi - lo) / lo
    } else {
        f64::INFINITY
    };
    let growth = norms.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    outcome(
        spread <= 0.1 && growth >= 4.0,
        format!("fitted T {ts:?}, spread {spread:.3} (tol 0.1); min norm growth per +4 K {growth:.2} (need 4)"),
    )
}

fn sqrt2_structure() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for alpha in [0.1, 0.3] {
        for k in [12, 16] {
            let p = ModelParams::new(alpha, k).unwrap();
            let c = StepControls::default_for(&p).with_record_every(1e-3);
            let tr = integrate(&p, &gen_front(k, 5, 1.35, 0.5).unwrap(), 2.0, &c).unwrap();
            let sq = check_sqrt2_structure(&tr);
            let ho = check_holder_half(&tr);
            let fronts = structural_front_series(&tr);
            let nondecr = fronts.windows(2).all(|w| w[1].1 >= w[0].1);
            ok &= tr.termination == Termination::ReachedTEnd && sq.passed && ho.passed && nondecr;
            lines.push(format!(
                "a={alpha} K={k}: sqrt2 {:.1e}, holder {:.1e}, K_t monotone {nondecr}",
                sq.worst_margin, ho.worst_margin
            ));
        }
    }
    outcome(ok, lines.join("; "))
}

fn dichotomy() -> Outcome {
    let front = Scenario::Front { k0: 5, q: 1.35, r: 0.5, amplitude: 10.0 };
    let t_end = 2.0;

    // Inviscid reference blow-up time for the same data.
    let p0 = ModelParams::inviscid(16).unwrap();
    let tr0 = integrate(&p0, &front.build(16).unwrap(), t_end, &StepControls::default_for(&p0).with_record_every(1e-4)).unwrap();
    let t_inv = BlowupDiagnostics::from_trajectory(&tr0, 0.5).unwrap().riccati_t;

    let params = ModelParams::new(0.15, 12).unwrap();
    let mut base = RunConfig::new(params, front, t_end).unwrap();
    base.controls = StepControls::default_for(&params).with_record_every(1e-3).with_escape_factor(30.0);
    let spec = SweepSpec {
        alphas: vec![0.15, 0.35],
        ks: vec![12, 16, 20],
        base,
        parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let rows = run_sweep(&spec).unwrap();
    let (low, high) = rows.split_at(3);
    let esc: Vec<Option<f64>> = low.iter().map(|r| r.escape_time).collect();
    let decreasing = esc.iter().all(Option::is_some)
        && esc.windows(2).all(|w| w[1].unwrap() < w[0].unwrap());
    let no_escape = high.iter().all(|r| r.termination == Termination::ReachedTEnd);
    let m: Vec<f64> = high.iter().map(|r| r.max_norm).collect();
    let lo = m.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = m.iter().copied().fold(0.0, f64::max);
    let var = (hi - lo) / lo;
    let past = t_inv.is_some_and(|t| t < t_end);
    outcome(
        decreasing && no_escape && var < 0.05 && past,
        format!(
            "inviscid T {t_inv:?} < t_end {t_end}; alpha 0.15 escape times {esc:?}; alpha 0.35 no escape {no_escape}, max norm variation {var:.2e} (tol 0.05)"
        ),
    )
}

fn integrator_validation() -> Outcome {
    let p = ModelParams::new(0.3, 12).unwrap();
    let st = gen_front(12, 5, 1.35, 0.5).unwrap();
    let run = |scheme: Scheme, dt: f64| {
        let c = StepControls::default_for(&p).with_scheme(scheme).with_dt_init(dt).with_record_every(0.1);
        integrate(&p, &st, 1.0, &c).unwrap().last().state.clone()
    };
    let reference = run(Scheme::ReferenceFixedRk4, 1e-5);
    let mut worst = 0.0_f64;
    for scheme in [Scheme::ExplicitAdaptive, Scheme::DuhamelImex] {
        let got = run(scheme, 1e-4);
        let d = got.values().iter().zip(reference.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = worst.max(d);
    }

    let p1 = ModelParams::inviscid(1).unwrap();
    let s1 = DyadicState::new(0.0, vec![0.0, 1.0]).unwrap();
    let mut riccati = 0.0_f64;
    for scheme in [Scheme::ExplicitAdaptive, Scheme::DuhamelImex, Scheme::ReferenceFixedRk4] {
        let c = StepControls::default_for(&p1).with_scheme(scheme).with_dt_init(1e-3).with_record_every(0.1);
        let a1 = integrate(&p1, &s1, 1.0, &c).unwrap().last().state.values()[1];
        riccati = riccati.max((a1 - 1.0 / 3.0).abs());
    }
    outcome(
        worst <= 1e-6 && riccati <= 1e-6,
        format!("adaptive vs RK4 reference {worst:.3e} (tol 1e-6); K=1 closed form error {riccati:.3e} (tol 1e-6)"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("operator agreement", operator_agreement),
        ("telescoped sum", telescoping),
        ("coercivity", coercivity),
        ("linear contraction", contraction),
        ("monotonicity and max principle", preservation),
        ("good/bad bound and J identity", goodbad_and_identity),
        ("inviscid blow-up proxy", inviscid_blowup),
        ("sqrt2 structure and Holder-1/2", sqrt2_structure),
        ("alpha = 1/4 dichotomy", dichotomy),
        ("integrator validation", integrator_validation),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!o.passed);
        println!("{tag} {:>2} {name} [{:.2?}]: {}", i + 1, start.elapsed(), o.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
