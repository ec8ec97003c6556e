//! Uniform pass/fail reports shared by the sequence and tree checkers.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

/// One checked item: `ratio = lhs / rhs` (or the checker's own ratio).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PointRecord {
    pub fn new(index: usize, lhs: f64, rhs: f64, ratio: f64) -> Self {
        PointRecord {
            index,
            lhs,
            rhs,
            ratio,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Parameters a checker ran with. Unused ones stay `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// The budget: the check passes iff `sup_ratio <= k`.
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub condition_name: String,
    pub records: Vec<PointRecord>,
    pub sup_ratio: f64,
    pub witness_index: Option<usize>,
    pub pass: bool,
    pub params: CheckParams,
    /// Named scalar summaries (minima, totals, fitted constants).
    #[serde(default)]
    pub summary: BTreeMap<String, f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl CheckReport {
    /// Reduces the records in index order, so the result does not depend on
    /// the order they were produced in. A NaN ratio counts as a failure.
    pub fn from_records(name: &str, mut records: Vec<PointRecord>, params: CheckParams) -> Self {
        records.sort_by_key(|r| r.index);
        let mut sup = 0.0f64;
        let mut witness = None;
        let mut nan = false;
        for r in &records {
            if r.ratio.is_nan() {
                nan = true;
                witness.get_or_insert(r.index);
            } else if r.ratio > sup || witness.is_none() && r.ratio >= sup {
                sup = r.ratio;
                witness = Some(r.index);
            }
        }
        if nan {
            sup = f64::NAN;
        }
        let pass = !nan && sup <= params.k;
        CheckReport {
            condition_name: name.to_string(),
            records,
            sup_ratio: sup,
            witness_index: witness,
            pass,
            params,
            summary: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn with_summary(mut self, key: &str, value: f64) -> Self {
        self.summary.insert(key.to_string(), value);
        self
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Per-record CSV: `index,lhs,rhs,ratio`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,lhs,rhs,ratio")?;
        for r in &self.records {
            writeln!(out, "{},{:e},{:e},{:e}", r.index, r.lhs, r.rhs, r.ratio)?;
        }
        Ok(())
    }
}
