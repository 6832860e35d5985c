//! Structured outcome of a numerical property check.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// How `metric` is compared against `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// pass iff `metric > threshold`
    GreaterThan,
    /// pass iff `metric >= threshold`
    AtLeast,
    /// pass iff `metric <= threshold`
    AtMost,
}

impl Comparison {
    pub fn holds(self, metric: f64, threshold: f64) -> bool {
        match self {
            Comparison::GreaterThan => metric > threshold,
            Comparison::AtLeast => metric >= threshold,
            Comparison::AtMost => metric <= threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::GreaterThan => ">",
            Comparison::AtLeast => ">=",
            Comparison::AtMost => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub claim: String,
    pub parameters: Vec<(String, f64)>,
    pub metric: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
    /// False when a side condition attached with a note failed.
    pub side_conditions: bool,
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn new(claim: &str, metric: f64, comparison: Comparison, threshold: f64) -> Self {
        VerificationReport {
            claim: claim.to_string(),
            parameters: Vec::new(),
            metric,
            threshold,
            comparison,
            // NaN metrics never pass
            passed: comparison.holds(metric, threshold),
            side_conditions: true,
            note: None,
        }
    }

    pub fn at_most(claim: &str, metric: f64, threshold: f64) -> Self {
        Self::new(claim, metric, Comparison::AtMost, threshold)
    }

    pub fn at_least(claim: &str, metric: f64, threshold: f64) -> Self {
        Self::new(claim, metric, Comparison::AtLeast, threshold)
    }

    pub fn greater_than(claim: &str, metric: f64, threshold: f64) -> Self {
        Self::new(claim, metric, Comparison::GreaterThan, threshold)
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.parameters.push((name.to_string(), value));
        self
    }

    pub fn note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    /// Forces the report to fail with an extra condition that does not hold.
    pub(crate) fn require(mut self, ok: bool, why: &str) -> Self {
        if !ok {
            self.passed = false;
            self.side_conditions = false;
            let note = match self.note.take() {
                Some(prev) => alloc::format!("{prev}; {why}"),
                None => why.to_string(),
            };
            self.note = Some(note);
        }
        self
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    /// Multiplies a nonzero threshold by `factor` and re-evaluates the outcome.
    pub fn scale_tolerance(&mut self, factor: f64) {
        if self.threshold != 0.0 {
            // a tolerance below zero (`metric >= -tol`) loosens toward -inf
            self.threshold *= factor;
        }
        self.passed = self.side_conditions && self.comparison.holds(self.metric, self.threshold);
    }

    /// Moves the threshold to the far side of the metric so the report fails.
    /// Used to exercise exit-code handling.
    pub fn force_failure(&mut self) {
        let pad = 1.0 + self.metric.abs();
        self.threshold = match self.comparison {
            Comparison::AtMost => self.metric - pad,
            Comparison::AtLeast | Comparison::GreaterThan => self.metric + pad,
        };
        self.passed = self.comparison.holds(self.metric, self.threshold);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(VerificationReport::at_most("a", 1.0, 1.0).passed);
        assert!(!VerificationReport::greater_than("a", 0.0, 0.0).passed);
        assert!(VerificationReport::at_least("a", 0.0, 0.0).passed);
        assert!(!VerificationReport::at_most("a", f64::NAN, 1.0).passed);
    }

    #[test]
    fn forced_failure_flips_outcome() {
        for mut r in [
            VerificationReport::at_most("a", 1e-14, 1e-12),
            VerificationReport::at_least("b", 3.0, -1e-12),
            VerificationReport::greater_than("c", 0.0, -1.0),
        ] {
            assert!(r.passed);
            r.force_failure();
            assert!(!r.passed);
        }
    }

    #[test]
    fn tolerance_scaling_keeps_side_conditions() {
        let mut r = VerificationReport::at_most("a", 2e-12, 1e-12);
        assert!(!r.passed);
        r.scale_tolerance(10.0);
        assert!(r.passed);
        let mut r = VerificationReport::at_most("b", 0.0, 1.0).require(false, "side");
        r.scale_tolerance(10.0);
        assert!(!r.passed);
        let mut r = VerificationReport::at_least("c", -2e-12, -1e-12);
        r.scale_tolerance(3.0);
        assert!(r.passed);
    }
}
