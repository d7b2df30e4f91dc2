//! Verification reports and the per-case recorder that fills them.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub master: u64,
    pub case: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub tag: String,
    pub status: Status,
    pub dims: BTreeMap<String, usize>,
    pub gaps: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub seeds: Seeds,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub runtime_ms: f64,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Tolerances shared by all suites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub gap: f64,
    pub residual: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { gap: 1e-8, residual: 1e-10, quadrature: 1e-12 }
    }
}

/// Collects measurements and asserted checks for one case.
pub struct Recorder {
    rng: ChaCha8Rng,
    seed: u64,
    pub tol: Tolerances,
    dims: BTreeMap<String, usize>,
    gaps: BTreeMap<String, f64>,
    checks: Vec<Check>,
    details: BTreeMap<String, serde_json::Value>,
    report_only: bool,
}

impl Recorder {
    pub fn new(seed: u64, tol: Tolerances) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            tol,
            dims: BTreeMap::new(),
            gaps: BTreeMap::new(),
            checks: Vec::new(),
            details: BTreeMap::new(),
            report_only: false,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&mut self, key: impl Into<String>, value: usize) {
        self.dims.insert(key.into(), value);
    }

    pub fn gap(&mut self, key: impl Into<String>, value: f64) {
        self.gaps.insert(key.into(), value);
    }

    /// Records `value` and asserts `value ≤ tol`.
    pub fn le(&mut self, key: impl Into<String>, value: f64, tol: f64) -> bool {
        let key = key.into();
        self.gap(key.clone(), value);
        let passed = value <= tol;
        self.checks.push(Check { name: key, passed, value: Some(value), tol: Some(tol), note: None });
        passed
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool) -> bool {
        self.checks.push(Check { name: name.into(), passed, value: None, tol: None, note: None });
        passed
    }

    pub fn check_with(&mut self, name: impl Into<String>, passed: bool, note: impl Into<String>) -> bool {
        self.checks.push(Check { name: name.into(), passed, value: None, tol: None, note: Some(note.into()) });
        passed
    }

    /// Records `actual` under `key` and asserts it equals `expected`.
    pub fn eq(&mut self, key: impl Into<String>, actual: usize, expected: usize) -> bool {
        let key = key.into();
        self.dim(key.clone(), actual);
        self.check_with(format!("{key} = {expected}"), actual == expected, format!("{actual}"))
    }

    pub fn detail(&mut self, key: impl Into<String>, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report details serialize");
        self.details.insert(key.into(), v);
    }

    /// Marks the case as reporting measurements beyond its assertions.
    pub fn report_only(&mut self) {
        self.report_only = true;
    }

    pub fn finish(
        self,
        case_id: String,
        tag: String,
        master: u64,
        error: Option<String>,
        runtime_ms: f64,
    ) -> VerificationReport {
        let failed = error.is_some() || self.checks.iter().any(|c| !c.passed);
        let status = if failed {
            Status::Fail
        } else if self.report_only {
            Status::ReportOnly
        } else {
            Status::Pass
        };
        VerificationReport {
            case_id,
            tag,
            status,
            dims: self.dims,
            gaps: self.gaps,
            checks: self.checks,
            seeds: Seeds { master, case: self.seed },
            details: self.details,
            error,
            runtime_ms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn any_failed_check_fails_the_case() {
        let mut r = Recorder::new(1, Tolerances::default());
        r.le("gap", 1e-9, 1e-8);
        r.report_only();
        assert_eq!(r.finish("c".into(), "t".into(), 0, None, 0.0).status, Status::ReportOnly);

        let mut r = Recorder::new(1, Tolerances::default());
        r.le("gap", 1e-9, 1e-8);
        r.eq("dim", 3, 4);
        let rep = r.finish("c".into(), "t".into(), 0, None, 0.0);
        assert_eq!(rep.status, Status::Fail);
        assert_eq!(rep.failed_checks().count(), 1);
    }

    #[test]
    fn errors_fail_the_case() {
        let r = Recorder::new(1, Tolerances::default());
        let rep = r.finish("c".into(), "t".into(), 0, Some("boom".into()), 0.0);
        assert_eq!(rep.status, Status::Fail);
    }
}
