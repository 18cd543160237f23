//! JSON reports.
//!
//! A report digest is the SHA-256 of the canonical JSON of the report with
//! the `timing_ms` fields removed, so two runs over the same inputs give
//! the same digest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Witness lists are cut to this length.
pub const MAX_WITNESSES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub status: Status,
    pub inputs_digest: String,
    pub checked: usize,
    pub witnesses: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl Check {
    /// `inputs` names what was checked; its digest goes into the record.
    pub fn new(check: &str, inputs: &str, checked: usize, witnesses: Vec<Value>) -> Check {
        let total = witnesses.len();
        let mut witnesses = witnesses;
        witnesses.truncate(MAX_WITNESSES);
        let detail = (total > MAX_WITNESSES).then(|| serde_json::json!({ "witnesses_total": total }));
        Check {
            check: check.into(),
            status: Status::from_bool(total == 0),
            inputs_digest: sha256_hex(inputs.as_bytes()),
            checked,
            witnesses,
            detail,
        }
    }

    /// A check whose verdict does not come from its witness list.
    pub fn with_status(mut self, ok: bool) -> Check {
        self.status = Status::from_bool(ok);
        self
    }

    pub fn with_detail(mut self, detail: Value) -> Check {
        self.detail = Some(detail);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub kind: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub timing_ms: u64,
}

impl SuiteReport {
    pub fn new(suite: &str, kind: &str, checks: Vec<Check>) -> SuiteReport {
        let status = Status::from_bool(checks.iter().all(Check::passed));
        SuiteReport { suite: suite.into(), kind: kind.into(), status, checks, timing_ms: 0 }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub toolkit_version: String,
    pub seed: u64,
    pub input_hashes: BTreeMap<String, String>,
    pub assertive: Vec<SuiteReport>,
    pub report_only: Vec<SuiteReport>,
    pub status: Status,
    pub timing_ms: u64,
    #[serde(default)]
    pub digest: String,
}

impl Report {
    pub fn new(seed: u64, input_hashes: BTreeMap<String, String>, suites: Vec<(SuiteReport, bool)>) -> Report {
        let (assertive, report_only): (Vec<_>, Vec<_>) = suites.into_iter().partition(|(_, a)| *a);
        let assertive: Vec<SuiteReport> = assertive.into_iter().map(|(s, _)| s).collect();
        let status = Status::from_bool(assertive.iter().all(SuiteReport::passed));
        let mut r = Report {
            toolkit_version: VERSION.into(),
            seed,
            input_hashes,
            assertive,
            report_only: report_only.into_iter().map(|(s, _)| s).collect(),
            status,
            timing_ms: 0,
            digest: String::new(),
        };
        r.digest = r.compute_digest();
        r
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Digest of the report without timing fields and without the digest.
    pub fn compute_digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        strip_timing(&mut v);
        if let Value::Object(m) = &mut v {
            m.remove("digest");
        }
        sha256_hex(v.to_string().as_bytes())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("timing_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(xs) => xs.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_ignores_timing() {
        let suite = SuiteReport::new("s", "fv-verify", vec![Check::new("c", "in", 3, vec![])]);
        let mut a = Report::new(1, BTreeMap::new(), vec![(suite, true)]);
        let d = a.digest.clone();
        a.timing_ms = 99;
        a.assertive[0].timing_ms = 12;
        assert_eq!(a.compute_digest(), d);
        a.seed = 2;
        assert_ne!(a.compute_digest(), d);
    }

    #[test]
    fn report_only_failures_do_not_fail_the_report() {
        let bad = SuiteReport::new("d2", "dense", vec![Check::new("c", "in", 1, vec![json!("x^2 + x + 1")])]);
        let good = SuiteReport::new("fv", "fv-verify", vec![Check::new("c", "in", 1, vec![])]);
        let r = Report::new(0, BTreeMap::new(), vec![(good, true), (bad, false)]);
        assert!(r.passed());
        assert_eq!(r.report_only[0].status, Status::Fail);
    }

    #[test]
    fn witnesses_are_truncated() {
        let c = Check::new("c", "in", 40, (0..40).map(|i| json!(i)).collect());
        assert_eq!(c.witnesses.len(), MAX_WITNESSES);
        assert_eq!(c.detail, Some(json!({ "witnesses_total": 40 })));
        assert!(!c.passed());
    }
}
