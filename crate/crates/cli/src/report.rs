use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One comparison. `pass` is derived, never set by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub analytic: f64,
    pub estimate: f64,
    pub se: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inconclusive: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, analytic: f64, estimate: f64, se: Option<f64>, tolerance: f64) -> Self {
        let pass = (analytic - estimate).abs() <= tolerance;
        Self {
            name: name.into(),
            analytic,
            estimate,
            se,
            tolerance,
            pass,
            inconclusive: false,
        }
    }

    /// Analytic-vs-analytic comparison at a fixed relative tolerance.
    pub fn relative(name: impl Into<String>, analytic: f64, estimate: f64, rel: f64) -> Self {
        Self::new(name, analytic, estimate, None, rel * analytic.abs())
    }

    /// Monte Carlo comparison at `3·SE + allowance`.
    pub fn monte_carlo(name: impl Into<String>, analytic: f64, estimate: f64, se: f64, allowance: f64) -> Self {
        Self::new(name, analytic, estimate, Some(se), 3.0 * se + allowance)
    }

    pub fn mark_inconclusive(mut self, flag: bool) -> Self {
        self.inconclusive = flag;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub version: String,
    pub experiment: String,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, String>,
}

/// Checks and results of one run; entries are only ever appended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub fingerprint: Fingerprint,
    checks: Vec<Check>,
    results: Vec<serde_json::Value>,
}

impl RunReport {
    pub fn new(fingerprint: Fingerprint) -> Self {
        Self {
            fingerprint,
            checks: Vec::new(),
            results: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn push_result(&mut self, value: serde_json::Value) {
        self.results.push(value);
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn results(&self) -> &[serde_json::Value] {
        &self.results
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 if every check passes, 1 on a failed check, 4 when the only
    /// problem is an inconclusive Monte Carlo estimate.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| !c.pass && !c.inconclusive) {
            1
        } else if self.checks.iter().any(|c| c.inconclusive) {
            4
        } else {
            0
        }
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
    fn pass_follows_tolerance() {
        assert!(Check::new("a", 1.0, 1.05, None, 0.1).pass);
        assert!(!Check::new("a", 1.0, 1.2, None, 0.1).pass);
        assert!(Check::monte_carlo("m", 0.5, 0.5029, 0.001, 0.0).pass);
        assert!(!Check::monte_carlo("m", 0.5, 0.504, 0.001, 0.0).pass);
    }

    #[test]
    fn exit_codes() {
        let fp = Fingerprint {
            version: "0".into(),
            experiment: "x".into(),
            seed: Some(1),
            parameters: BTreeMap::new(),
        };
        let mut r = RunReport::new(fp);
        r.push(Check::new("ok", 1.0, 1.0, None, 0.0));
        assert_eq!(r.exit_code(), 0);
        r.push(Check::new("vague", 1.0, 2.0, Some(5.0), 0.1).mark_inconclusive(true));
        assert_eq!(r.exit_code(), 4);
        r.push(Check::new("bad", 1.0, 2.0, None, 0.1));
        assert_eq!(r.exit_code(), 1);
    }
}
