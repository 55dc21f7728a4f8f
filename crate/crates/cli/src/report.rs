//! Machine-readable run reports.
//!
//! Reports are byte-deterministic for a given (config, seed, tool
//! version): map fields are ordered, floats are printed in Rust's shortest
//! round-trip form, and wall-clock timing is only included when explicitly
//! requested via `--timings`.

use std::collections::BTreeMap;

use serde::Serialize;

pub const TOOL_NAME: &str = "qexch";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
}

/// One verified claim. `status` feeds the process exit code.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn pass(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            status: Status::Pass,
            detail: None,
        }
    }

    pub fn fail(id: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            status: Status::Fail,
            detail: Some(detail.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// An observation that informs but does not gate the exit code, e.g. the
/// decided outcome of an instance-specific hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub id: String,
    pub outcome: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub suite: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u128>,
}

impl Report {
    pub fn new(suite: impl Into<String>, config: BTreeMap<String, String>) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            suite: suite.into(),
            config,
            checks: Vec::new(),
            diagnostics: Vec::new(),
            status: Status::Pass,
            runtime_ms: None,
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        if check.status == Status::Fail {
            self.status = Status::Fail;
        }
        self.checks.push(check);
    }

    pub fn diagnose(&mut self, id: impl Into<String>, outcome: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            id: id.into(),
            outcome: outcome.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}
