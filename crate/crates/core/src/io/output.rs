use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{BlowupDiagnostics, InvariantReport};
use crate::error::{DyadicError, Result};
use crate::integrate::{Termination, Trajectory};
use crate::model::{slopes, weighted_slopes, DyadicState};

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| DyadicError::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn opt<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub const TRAJECTORY_HEADER: &str = "t,a_0,sup_a,xs_norm,J,max_ratio,front_index,holder_half,termination";

/// One row per sample; the termination reason is written on the last row only.
/// Floats use the shortest representation that parses back exactly.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    let n = traj.samples.len();
    for (i, s) in traj.samples.iter().enumerate() {
        let d = &s.diagnostics;
        let term = if i + 1 == n { traj.termination.as_str() } else { "" };
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{},{},{:?},{}",
            s.t(),
            d.a0,
            d.sup_a,
            d.xs_norm,
            d.j,
            opt(d.max_ratio),
            opt(d.front_index),
            d.holder_half,
            term
        );
    }
    out
}

/// A parsed trajectory CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub a0: f64,
    pub sup_a: f64,
    pub xs_norm: f64,
    pub j: f64,
    pub max_ratio: Option<f64>,
    pub front_index: Option<usize>,
    pub holder_half: f64,
    pub termination: Option<Termination>,
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines();
    let bad = |line: usize, msg: String| DyadicError::Parse {
        path: "trajectory csv".into(),
        message: format!("line {line}: {msg}"),
    };
    match lines.next() {
        Some(h) if h == TRAJECTORY_HEADER => {}
        other => return Err(bad(1, format!("unexpected header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let ln = i + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad(ln, format!("expected 9 fields, got {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(ln, format!("`{s}`: {e}")));
        rows.push(TrajectoryRow {
            t: num(f[0])?,
            a0: num(f[1])?,
            sup_a: num(f[2])?,
            xs_norm: num(f[3])?,
            j: num(f[4])?,
            max_ratio: if f[5].is_empty() { None } else { Some(num(f[5])?) },
            front_index: if f[6].is_empty() {
                None
            } else {
                Some(f[6].parse().map_err(|e| bad(ln, format!("`{}`: {e}", f[6])))?)
            },
            holder_half: num(f[7])?,
            termination: if f[8].is_empty() {
                None
            } else {
                Some(Termination::parse(f[8]).ok_or_else(|| bad(ln, format!("unknown termination `{}`", f[8])))?)
            },
        });
    }
    Ok(rows)
}

/// `k,a_k,b_k,b_ks` per index (`b_0 = 0`).
pub fn state_csv(state: &DyadicState, s: f64) -> String {
    let b = slopes(state);
    let bs = weighted_slopes(state, s);
    let mut out = String::from("k,a_k,b_k,b_ks\n");
    for (k, a) in state.values().iter().enumerate() {
        let _ = writeln!(out, "{k},{a:?},{:?},{:?}", b.get(k), bs.get(k));
    }
    out
}

/// Points `(2^-k, a_k)` in increasing `x`: the piecewise-linear profile whose
/// value at `2^-k` is `a_k`.
pub fn profile_reconstruction(state: &DyadicState) -> Vec<(f64, f64)> {
    state
        .values()
        .iter()
        .enumerate()
        .rev()
        .map(|(k, &a)| ((-(k as f64)).exp2(), a))
        .collect()
}

pub fn profile_csv(state: &DyadicState) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in profile_reconstruction(state) {
        let _ = writeln!(out, "{x:?},{y:?}");
    }
    out
}

/// JSON array of reports. Non-finite margins (nothing tested) become `null`.
pub fn reports_json(reports: &[InvariantReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialise")
}

/// Files written by [`save_outputs`].
#[derive(Clone, Debug, PartialEq)]
pub struct OutputPaths {
    pub trajectory: PathBuf,
    pub final_state: PathBuf,
    pub profile: PathBuf,
    pub reports: PathBuf,
    pub blowup: Option<PathBuf>,
}

/// Writes `<prefix>.trajectory.csv`, `<prefix>.state.csv` (final sample),
/// `<prefix>.profile.csv`, `<prefix>.reports.json` and, when given,
/// `<prefix>.blowup.json`.
pub fn save_outputs(
    traj: &Trajectory,
    reports: &[InvariantReport],
    blowup: Option<&BlowupDiagnostics>,
    prefix: &str,
) -> Result<OutputPaths> {
    let path = |suffix: &str| PathBuf::from(format!("{prefix}.{suffix}"));
    let last = &traj.last().state;
    let paths = OutputPaths {
        trajectory: path("trajectory.csv"),
        final_state: path("state.csv"),
        profile: path("profile.csv"),
        reports: path("reports.json"),
        blowup: blowup.map(|_| path("blowup.json")),
    };
    write_atomic(&paths.trajectory, &trajectory_csv(traj))?;
    write_atomic(&paths.final_state, &state_csv(last, traj.params.norm_s))?;
    write_atomic(&paths.profile, &profile_csv(last))?;
    write_atomic(&paths.reports, &reports_json(reports))?;
    if let (Some(b), Some(p)) = (blowup, &paths.blowup) {
        let json = serde_json::to_string_pretty(b).expect("diagnostics serialise");
        write_atomic(p, &json)?;
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_example() {
        let s = DyadicState::new(0.0, vec![0.0, 1.0, 1.5]).unwrap();
        assert_eq!(profile_reconstruction(&s), vec![(0.25, 1.5), (0.5, 1.0), (1.0, 0.0)]);
        let z = DyadicState::constant(0.0, 4, 0.0).unwrap();
        let p = profile_reconstruction(&z);
        assert!(p.iter().all(|&(_, y)| y == 0.0));
        assert!(p.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn state_dump_format() {
        let s = DyadicState::new(0.0, vec![0.0, 0.5, 0.75]).unwrap();
        assert_eq!(state_csv(&s, 2.0), "k,a_k,b_k,b_ks\n0,0.0,0.0,0.0\n1,0.5,1.0,2.0\n2,0.75,1.0,4.0\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("f.txt");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
