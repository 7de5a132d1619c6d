//! Structured pass/fail records emitted by every verification routine.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

/// One named check: a residual compared against a threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub details: String,
}

impl Check {
    /// Passes iff `residual ≤ tolerance` and the residual is finite.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual.is_finite() && residual <= tolerance,
            residual,
            tolerance,
            details: String::new(),
        }
    }

    /// Passes iff `residual < threshold`; used for "must move" controls.
    pub fn below(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual.is_finite() && residual < threshold,
            residual,
            tolerance: threshold,
            details: String::new(),
        }
    }

    /// An exact (integer / boolean) check; residual is |got − want|.
    pub fn exact(name: impl Into<String>, got: i64, want: i64) -> Self {
        Self {
            name: name.into(),
            passed: got == want,
            residual: (got - want).abs() as f64,
            tolerance: 0.0,
            details: format!("got {got}, expected {want}"),
        }
    }

    pub fn with_details(mut self, details: impl Into<String>) -> Self {
        self.details = details.into();
        self
    }

    /// Replaces a non-finite residual so the record stays printable as JSON.
    fn sanitized(mut self) -> Self {
        if !self.residual.is_finite() {
            self.details = format!("non-finite residual {}; {}", self.residual, self.details);
            self.residual = f64::MAX;
            self.passed = false;
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: String,
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            suite: suite.into(),
            passed: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        let check = check.sanitized();
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn with(mut self, check: Check) -> Self {
        self.push(check);
        self
    }

    /// Appends every check of `other`, prefixing names with its suite.
    pub fn absorb(&mut self, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{}/{}", other.suite, c.name);
            self.push(c);
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest residual over all checks (0 for an empty report).
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_iff_all_checks_pass() {
        let mut r = VerificationReport::new("t");
        assert!(r.passed);
        r.push(Check::at_most("a", 1e-13, 1e-12));
        assert!(r.passed);
        r.push(Check::at_most("b", 1e-9, 1e-12));
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn nan_residual_fails_and_stays_finite() {
        let r = VerificationReport::new("t").with(Check::at_most("nan", f64::NAN, 1.0));
        assert!(!r.passed);
        assert!(r.checks[0].residual.is_finite());
        serde_json::to_string(&r).unwrap();
    }
}
