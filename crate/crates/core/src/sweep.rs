//! `(alpha, K)` scans run in parallel with deterministic output order.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{DyadicError, Result};
use crate::integrate::{integrate, Termination};
use crate::io::RunConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub ks: Vec<usize>,
    /// Model, controls, scenario and run settings shared by every cell;
    /// `alpha` and `trunc_k` are replaced per cell.
    pub base: RunConfig,
    pub parallelism: usize,
}

/// Result of one `(alpha, K)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub trunc_k: usize,
    /// `max_t ||a(t)||_{X^s}` over the recorded samples.
    pub max_norm: f64,
    pub escape_time: Option<f64>,
    pub termination: Termination,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.ks.is_empty() {
            return Err(DyadicError::Config("alphas and ks must be non-empty".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(DyadicError::Config(format!("alpha must be >= 0, got {a}")));
        }
        if self.parallelism == 0 {
            return Err(DyadicError::Config("parallelism must be >= 1".into()));
        }
        Ok(())
    }

    /// Cells in output order: alphas outer, truncations inner, as listed.
    pub fn cells(&self) -> Vec<(f64, usize)> {
        self.alphas
            .iter()
            .flat_map(|&a| self.ks.iter().map(move |&k| (a, k)))
            .collect()
    }
}

/// Parses a sweep file: a run configuration plus a `[sweep]` section with
/// `alphas`, `ks` and optional `parallelism` (else `default_parallelism`).
/// `alpha` and `trunc_k` may be omitted from `[model]`.
pub fn parse_sweep(text: &str, origin: &str, default_parallelism: usize) -> Result<SweepSpec> {
    let parse_err = |message: String| DyadicError::Parse {
        path: origin.to_string(),
        message,
    };
    let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let sweep = table
        .remove("sweep")
        .ok_or_else(|| parse_err("missing [sweep] section".into()))?;
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawSweep {
        alphas: Vec<f64>,
        ks: Vec<usize>,
        parallelism: Option<usize>,
    }
    let raw: RawSweep = sweep
        .try_into()
        .map_err(|e: toml::de::Error| parse_err(format!("[sweep]: {e}")))?;
    if raw.alphas.is_empty() || raw.ks.is_empty() {
        return Err(DyadicError::Config("alphas and ks must be non-empty".into()));
    }
    let model = table
        .entry("model")
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    if let toml::Value::Table(m) = model {
        m.entry("alpha").or_insert(toml::Value::Float(raw.alphas[0]));
        m.entry("trunc_k").or_insert(toml::Value::Integer(raw.ks[0] as i64));
    }
    let base: crate::io::config::RawConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
    let spec = SweepSpec {
        alphas: raw.alphas,
        ks: raw.ks,
        base: base.resolve()?,
        parallelism: raw.parallelism.unwrap_or(default_parallelism),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_sweep(path: &Path, default_parallelism: usize) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_sweep(&text, &path.display().to_string(), default_parallelism)
}

fn run_cell(base: &RunConfig, alpha: f64, trunc_k: usize) -> Result<SweepRow> {
    let mut params = base.params;
    params.alpha = alpha;
    params.trunc_k = trunc_k;
    params.validate()?;
    let state0 = base.scenario.build(trunc_k)?;
    let traj = integrate(&params, &state0, base.t_end, &base.controls)?;
    Ok(SweepRow {
        alpha,
        trunc_k,
        max_norm: traj.max_xs_norm(),
        escape_time: (traj.termination == Termination::EscapeDetected).then(|| traj.last().t()),
        termination: traj.termination,
    })
}

/// Runs every cell on a pool of `spec.parallelism` threads. Rows come back in
/// [`SweepSpec::cells`] order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.parallelism)
        .build()
        .map_err(|e| DyadicError::Config(format!("thread pool: {e}")))?;
    let cells = spec.cells();
    pool.install(|| {
        cells
            .par_iter()
            .map(|&(a, k)| run_cell(&spec.base, a, k))
            .collect()
    })
}

/// `alpha,K,max_norm,escape_time` (empty escape time when none).
pub fn summary_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("alpha,K,max_norm,escape_time\n");
    for r in rows {
        let esc = r.escape_time.map(|t| format!("{t:?}")).unwrap_or_default();
        let _ = writeln!(out, "{:?},{},{:?},{}", r.alpha, r.trunc_k, r.max_norm, esc);
    }
    out
}
