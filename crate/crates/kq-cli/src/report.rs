//! Run reports and the mapping from outcomes to exit codes.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Counterexample,
    Error,
}

impl Status {
    pub fn exit_code(self, failure: Option<&Failure>) -> i32 {
        match (self, failure) {
            (Status::Pass, _) => 0,
            (Status::Counterexample, _) => 1,
            (Status::Error, Some(Failure::Internal(_))) => 1,
            (Status::Error, _) => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Counterexample => "COUNTEREXAMPLE",
            Status::Error => "ERROR",
        })
    }
}

/// A cell, map, stage or problem backing a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: String,
    pub value: Value,
}

impl Witness {
    pub fn new(kind: &str, value: impl Serialize) -> Witness {
        Witness { kind: kind.to_string(), value: serde_json::to_value(value).unwrap_or(Value::Null) }
    }
}

/// Wall-clock measurements, kept apart so the rest of a report is reproducible.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub status: Status,
    pub summary: Vec<String>,
    pub details: Value,
    pub witnesses: Vec<Witness>,
    pub timings: Timings,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The summary printed to standard output.
    pub fn render(&self) -> String {
        let name = self.command.iter().take_while(|a| !a.starts_with('-')).cloned().collect::<Vec<_>>().join(" ");
        let mut out = format!("kq {name}: {}\n", self.status);
        for line in &self.summary {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
        for w in &self.witnesses {
            out.push_str(&format!("  witness {}: {}\n", w.kind, w.value));
        }
        out
    }
}

/// Why a command could not produce a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// Unreadable or malformed input.
    Input(String),
    /// A construction broke one of its own invariants.
    Internal(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "invalid input: {m}"),
            Failure::Internal(m) => write!(f, "internal failure: {m}"),
        }
    }
}

impl From<kq_core::Error> for Failure {
    fn from(e: kq_core::Error) -> Failure {
        match e {
            kq_core::Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// What a command hands back before it is wrapped into a [`Report`].
#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub summary: Vec<String>,
    pub details: Value,
    pub witnesses: Vec<Witness>,
    /// Replayable evidence, written to `--emit-cert`.
    pub certificate: Option<String>,
    /// The constructed object, written to `--out`.
    pub artifact: Option<String>,
}

impl Outcome {
    pub fn new(passed: bool, summary: Vec<String>, details: Value) -> Outcome {
        Outcome {
            status: if passed { Status::Pass } else { Status::Counterexample },
            summary,
            details,
            witnesses: Vec::new(),
            certificate: None,
            artifact: None,
        }
    }

    pub fn witness(mut self, kind: &str, value: impl Serialize) -> Outcome {
        self.witnesses.push(Witness::new(kind, value));
        self
    }

    pub fn certificate(mut self, text: String) -> Outcome {
        self.certificate = Some(text);
        self
    }

    pub fn artifact(mut self, text: String) -> Outcome {
        self.artifact = Some(text);
        self
    }
}
