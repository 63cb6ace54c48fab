//! Check results and report documents shared by the command-line tools.
//!
//! A report is deterministic: field order is fixed by the struct layout,
//! numbers are serialized by serde_json, and nothing time- or
//! machine-dependent is stored (wall-clock timing goes to stderr, never
//! into a report).

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Not evaluated because a check it presupposes already failed (or the
    /// configuration is outside the check's domain). Skipped is not a
    /// failure.
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub threshold: f64,
    /// status != Fail
    pub pass: bool,
    pub status: CheckStatus,
}

impl CheckResult {
    pub fn measured(name: &str, max_residual: f64, threshold: f64) -> CheckResult {
        // NaN must never pass
        let ok = max_residual.is_finite() && max_residual <= threshold;
        CheckResult {
            name: name.to_string(),
            max_residual,
            threshold,
            pass: ok,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        }
    }

    /// Boolean check, reported with residual 0 or 1 against threshold 1/2.
    pub fn flag(name: &str, ok: bool) -> CheckResult {
        CheckResult::measured(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    pub fn skipped(name: &str, threshold: f64) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            max_residual: 0.0,
            threshold,
            pass: true,
            status: CheckStatus::Skipped,
        }
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| !c.failed())
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDoc {
    /// tool name and version
    pub tool: String,
    pub command: String,
    /// configuration echo; parsing this text reproduces the run's spec
    /// bit-exactly
    pub spec: String,
    pub seed: u64,
    pub samples: usize,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

impl ReportDoc {
    pub fn new(
        tool: &str,
        command: &str,
        spec: String,
        seed: u64,
        samples: usize,
        suites: Vec<SuiteResult>,
    ) -> ReportDoc {
        let pass = suites.iter().all(SuiteResult::pass);
        ReportDoc { tool: tool.to_string(), command: command.to_string(), spec, seed, samples, suites, pass }
    }

    pub fn failing(&self) -> Vec<&CheckResult> {
        self.suites.iter().flat_map(|s| s.checks.iter().filter(|c| c.failed())).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_and_overall_verdict() {
        let good = CheckResult::measured("a", 1e-13, 1e-12);
        assert!(good.pass && good.status == CheckStatus::Pass);
        let bad = CheckResult::measured("b", 2e-12, 1e-12);
        assert!(!bad.pass && bad.failed());
        let nan = CheckResult::measured("c", f64::NAN, 1e-12);
        assert!(nan.failed());
        let skip = CheckResult::skipped("d", 1e-9);
        assert!(skip.pass && !skip.failed());
        assert!(CheckResult::flag("e", true).pass);
        assert!(!CheckResult::flag("f", false).pass);

        let suite = SuiteResult { name: "s".into(), checks: vec![good.clone(), skip.clone()] };
        assert!(suite.pass());
        let doc = ReportDoc::new("t 0.0.0", "verify", String::new(), 7, 3, vec![suite]);
        assert!(doc.pass && doc.failing().is_empty());
        let doc2 = ReportDoc::new(
            "t 0.0.0",
            "verify",
            String::new(),
            7,
            3,
            vec![SuiteResult { name: "s".into(), checks: vec![good, bad, skip] }],
        );
        assert!(!doc2.pass);
        assert_eq!(doc2.failing().len(), 1);
        assert_eq!(doc2.failing()[0].name, "b");
    }

    #[test]
    fn json_shape_is_stable() {
        let doc = ReportDoc::new(
            "t 0.1.0",
            "verify",
            "n = 0\n".into(),
            11,
            2,
            vec![SuiteResult {
                name: "metric".into(),
                checks: vec![
                    CheckResult::measured("metric_inverse", 5e-16, 1e-12),
                    CheckResult::skipped("parallel_j", 1e-10),
                ],
            }],
        );
        let json = doc.to_json();
        assert!(json.ends_with('\n'));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["tool"], "t 0.1.0");
        assert_eq!(v["suites"][0]["checks"][0]["status"], "pass");
        assert_eq!(v["suites"][0]["checks"][1]["status"], "skipped");
        assert_eq!(v["suites"][0]["checks"][1]["pass"], true);
        assert_eq!(v["pass"], true);
        // serialization is a pure function of the document
        assert_eq!(json, doc.to_json());
    }
}
