use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const EXIT_REPRODUCED: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Reproduced,
    Refuted,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Reproduced => EXIT_REPRODUCED,
            Status::Refuted => EXIT_REFUTED,
            Status::Error => EXIT_USAGE,
        }
    }
}

/// One expected value compared against what was computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub ok: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl ToString, observed: impl ToString) -> Self {
        let expected = expected.to_string();
        let observed = observed.to_string();
        Check {
            name: name.into(),
            ok: expected == observed,
            expected,
            observed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub status: Status,
    pub results: Value,
    pub timing_ms: u64,
}

impl Report {
    /// The checks list embedded in `results`, if any.
    pub fn checks(&self) -> Vec<Check> {
        self.results
            .get("checks")
            .and_then(|c| serde_json::from_value(c.clone()).ok())
            .unwrap_or_default()
    }

    /// `results.error` for reports with status `error`.
    pub fn error_message(&self) -> Option<&str> {
        self.results.get("error").and_then(Value::as_str)
    }
}

/// `reproduced` exactly when every check matched.
pub fn status_of(checks: &[Check]) -> Status {
    if checks.iter().all(|c| c.ok) {
        Status::Reproduced
    } else {
        Status::Refuted
    }
}
