//! The machine-readable verification report.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyze::{Report, Stats, Verdict, Violation, ViolationKind};
use crate::label::Label;

pub const SCHEMA_VERSION: &str = "1";

/// JSON Schema (draft 2020-12) for [`JsonReport`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonStats {
    pub states: usize,
    pub transitions: usize,
    pub alphabet: usize,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonViolation {
    pub kind: ViolationKind,
    pub subject: String,
    pub trace: Vec<Label>,
    pub cycle: Option<Vec<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: String,
    pub target: String,
    pub result: Verdict,
    pub stats: JsonStats,
    pub violations: Vec<JsonViolation>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub terminal_sets: usize,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unsupported schemaVersion `{0}`")]
    Version(String),
    #[error("result is {stated:?} but there are {violations} violation(s)")]
    Inconsistent { stated: Verdict, violations: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<&Report> for JsonReport {
    fn from(r: &Report) -> Self {
        JsonReport {
            schema_version: SCHEMA_VERSION.into(),
            target: r.target.clone(),
            result: r.result(),
            stats: JsonStats {
                states: r.stats.states,
                transitions: r.stats.transitions,
                alphabet: r.stats.alphabet,
                elapsed_ms: r.stats.elapsed_ms,
            },
            violations: r
                .violations
                .iter()
                .map(|v| JsonViolation {
                    kind: v.kind,
                    subject: v.subject.clone(),
                    trace: v.trace.clone(),
                    cycle: v.cycle.clone(),
                    note: v.note.clone(),
                })
                .collect(),
            warnings: r.warnings.clone(),
            terminal_sets: r.terminal_sets,
        }
    }
}

impl TryFrom<JsonReport> for Report {
    type Error = ReportError;

    fn try_from(j: JsonReport) -> Result<Self, ReportError> {
        if j.schema_version != SCHEMA_VERSION {
            return Err(ReportError::Version(j.schema_version));
        }
        let expected = if j.violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
        if j.result != expected {
            return Err(ReportError::Inconsistent { stated: j.result, violations: j.violations.len() });
        }
        Ok(Report {
            target: j.target,
            stats: Stats {
                states: j.stats.states,
                transitions: j.stats.transitions,
                alphabet: j.stats.alphabet,
                elapsed_ms: j.stats.elapsed_ms,
            },
            violations: j
                .violations
                .into_iter()
                .map(|v| Violation { kind: v.kind, subject: v.subject, trace: v.trace, cycle: v.cycle, note: v.note })
                .collect(),
            warnings: j.warnings,
            terminal_sets: j.terminal_sets,
        })
    }
}

impl JsonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<JsonReport, ReportError> {
        Ok(serde_json::from_str(text)?)
    }
}
