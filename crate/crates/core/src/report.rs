//! Machine-readable outcomes of inequality checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;

/// Version tag written into every JSON document.
pub const SCHEMA: &str = "tml/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The claim does not apply to the given parameters.
    Skipped,
    /// A desk-scale budget was exceeded.
    Budget,
    /// Invalid input or a failed construction.
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Budget => "budget",
            Status::Error => "error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
}

/// One checked claim: parameters, pass/fail and the empirical constants
/// observed on the way.
///
/// `expect_fail` marks negative controls: a symbol that is known not to
/// satisfy the claim, run to show the check can fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub claim_id: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub expect_fail: bool,
    pub observed: Vec<Observation>,
    pub tolerance: f64,
    pub artifacts: Vec<String>,
    pub notes: Vec<String>,
}

impl CertificationReport {
    pub fn new(claim_id: impl Into<String>) -> Self {
        Self {
            claim_id: claim_id.into(),
            params: BTreeMap::new(),
            status: Status::Skipped,
            expect_fail: false,
            observed: Vec::new(),
            tolerance: 0.0,
            artifacts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl fmt::Display) {
        self.params.insert(key.to_owned(), value.to_string());
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn expect_fail(mut self, yes: bool) -> Self {
        self.expect_fail = yes;
        self
    }

    pub fn observe(&mut self, name: &str, value: f64) {
        self.observed.push(Observation {
            name: name.to_owned(),
            value,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn conclude(mut self, pass: bool) -> Self {
        self.status = if pass { Status::Pass } else { Status::Fail };
        self
    }

    pub fn skipped(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.notes.push(reason.into());
        self
    }

    /// Records `err` as the outcome; budget violations get their own status.
    pub fn failed_with(mut self, err: &Error) -> Self {
        self.status = if err.is_resource() {
            Status::Budget
        } else {
            Status::Error
        };
        self.notes.push(err.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Pass for ordinary claims, fail for negative controls; skipped claims
    /// are neutral.
    pub fn meets_expectation(&self) -> bool {
        match self.status {
            Status::Pass => !self.expect_fail,
            Status::Fail => self.expect_fail,
            Status::Skipped => true,
            Status::Budget | Status::Error => false,
        }
    }

    pub fn observed_value(&self, name: &str) -> Option<f64> {
        self.observed.iter().find(|o| o.name == name).map(|o| o.value)
    }

    /// JSON with every number written as a 17-significant-digit string.
    pub fn to_json(&self) -> Value {
        let observed: Vec<Value> = self
            .observed
            .iter()
            .map(|o| json!({ "name": o.name, "value": fmt_num(o.value) }))
            .collect();
        json!({
            "schema": SCHEMA,
            "claim_id": self.claim_id,
            "params": self.params,
            "status": self.status.to_string(),
            "pass": self.passed(),
            "expect_fail": self.expect_fail,
            "meets_expectation": self.meets_expectation(),
            "observed": observed,
            "tolerance": fmt_num(self.tolerance),
            "artifacts": self.artifacts,
            "notes": self.notes,
        })
    }
}

/// `{:.16e}` for finite values, `"inf"`, `"-inf"` or `"nan"` otherwise.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_control_semantics() {
        let r = CertificationReport::new("krok1").expect_fail(true).conclude(false);
        assert!(!r.passed());
        assert!(r.meets_expectation());
        let r = CertificationReport::new("krok1").conclude(false);
        assert!(!r.meets_expectation());
    }

    #[test]
    fn json_numbers_are_strings() {
        let mut r = CertificationReport::new("euck").param("d", 2).conclude(true);
        r.observe("min", 0.1);
        let v = r.to_json();
        assert_eq!(v["observed"][0]["value"], "1.0000000000000001e-1");
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["params"]["d"], "2");
    }

    #[test]
    fn budget_status() {
        let r = CertificationReport::new("x").failed_with(&Error::resource("grid", 10, 5));
        assert_eq!(r.status, Status::Budget);
    }
}
