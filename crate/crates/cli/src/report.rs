//! Versioned JSON reports with per-check certificates.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use symideal_core::{rational, Q};

pub const SCHEMA: &str = "symideal-report/1";

/// Failures kept per check; the count is always exact.
const FAILURE_SAMPLES: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    pub certificates: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "is_zero")]
    pub failure_count: usize,
    #[serde(skip)]
    precision: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

/// `{"exact": "p/q", "decimal": "..."}`.
pub fn q_value(x: &Q, precision: usize) -> Value {
    json!({ "exact": rational::fmt(x), "decimal": rational::decimal(x, precision) })
}

impl Check {
    pub fn new(name: &str, precision: usize) -> Self {
        Self {
            name: name.to_string(),
            passed: true,
            trials: 0,
            certificates: BTreeMap::new(),
            failures: Vec::new(),
            failure_count: 0,
            precision,
        }
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.passed = false;
        self.failure_count += 1;
        if self.failures.len() < FAILURE_SAMPLES {
            self.failures.push(why.into());
        }
    }

    /// Counts a trial and fails with `why` unless `ok`.
    pub fn expect(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.fail(why());
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.certificates.insert(key.to_string(), v.into());
    }

    pub fn set_q(&mut self, key: &str, x: &Q) {
        let v = q_value(x, self.precision);
        self.set(key, v);
    }

    /// Running maximum of a rational certificate.
    pub fn max_q(&mut self, key: &str, x: &Q) {
        let bigger = match self.certificates.get(key).and_then(|v| v["exact"].as_str()) {
            Some(s) => rational::parse(s).map_or(true, |cur| *x > cur),
            None => true,
        };
        if bigger {
            self.set_q(key, x);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: &str, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { suite: suite.to_string(), passed, checks }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn new(seed: u64, suites: Vec<SuiteReport>) -> Self {
        let passed = suites.iter().all(|s| s.passed);
        Self { schema: SCHEMA, seed, passed, suites }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use symideal_core::rational::frac;

    #[test]
    fn check_bookkeeping() {
        let mut c = Check::new("x", 4);
        c.max_q("m", &frac(1, 3));
        c.max_q("m", &frac(1, 4));
        assert_eq!(c.certificates["m"]["exact"], "1/3");
        assert_eq!(c.certificates["m"]["decimal"], "0.3333");
        for i in 0..8 {
            c.expect(i % 2 == 0, || format!("odd {i}"));
        }
        assert!(!c.passed);
        assert_eq!((c.trials, c.failure_count, c.failures.len()), (8, 4, 4));
        let r = Report::new(1, vec![SuiteReport::new("s", vec![c])]);
        assert!(r.to_json().contains("\"schema\": \"symideal-report/1\""));
    }
}
