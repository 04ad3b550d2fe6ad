use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Where the worst margin of a check occurred.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub t: f64,
    pub index: usize,
}

/// Outcome of one check: `passed` iff `worst_margin >= -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub name: String,
    pub passed: bool,
    /// Signed slack of the worst instance; `+inf` when nothing was tested.
    pub worst_margin: f64,
    pub worst_location: Option<Location>,
    pub tolerance: f64,
    /// Instances skipped as unresolved (e.g. ratios with vanishing denominators).
    pub skipped: usize,
    /// Fitted or auxiliary quantities.
    pub extras: BTreeMap<String, f64>,
    pub note: Option<String>,
}

impl InvariantReport {
    pub fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: true,
            worst_margin: f64::INFINITY,
            worst_location: None,
            tolerance,
            skipped: 0,
            extras: BTreeMap::new(),
            note: None,
        }
    }

    /// Records one instance. NaN margins count as violations.
    pub fn observe(&mut self, margin: f64, t: f64, index: usize) {
        let m = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if m < self.worst_margin || self.worst_location.is_none() {
            self.worst_margin = m;
            self.worst_location = Some(Location { t, index });
        }
        self.passed = self.worst_margin >= -self.tolerance;
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Marks the report failed regardless of margins (e.g. unmet precondition).
    pub fn fail(mut self, note: impl Into<String>) -> Self {
        self.passed = false;
        self.note = Some(note.into());
        self
    }

    /// Folds another report's instances into this one.
    pub fn merge(&mut self, other: &InvariantReport) {
        if let Some(loc) = other.worst_location {
            self.observe(other.worst_margin, loc.t, loc.index);
        }
        self.skipped += other.skipped;
        self.passed &= other.passed;
    }
}
