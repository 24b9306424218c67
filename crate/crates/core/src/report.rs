//! Verification reports with a stable JSON layout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One row of a refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub resolution: Vec<usize>,
    pub residual: f64,
    pub relative_residual: f64,
}

/// Named residuals and margins of a single check.
///
/// `relative_residual = |residual| / max(normalizer, 1e-300)` and
/// `pass <=> relative_residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub values: BTreeMap<String, f64>,
    pub residual: f64,
    pub relative_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub resolution: Vec<usize>,
    pub convergence: Vec<ConvergenceRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, residual: f64, normalizer: f64, tolerance: f64) -> Self {
        let relative = relative_residual(residual, normalizer);
        Self {
            name: name.into(),
            values: BTreeMap::new(),
            residual,
            relative_residual: relative,
            tolerance,
            pass: relative <= tolerance,
            resolution: Vec::new(),
            convergence: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn with_value(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), value);
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn with_resolution(mut self, resolution: &[usize]) -> Self {
        self.resolution = resolution.to_vec();
        self
    }

    /// Records a violated hypothesis; the check no longer certifies anything.
    pub fn fail_with(&mut self, warning: impl Into<String>) {
        self.warnings.push(warning.into());
        self.pass = false;
    }

    /// Empirical convergence orders between consecutive rows, assuming each
    /// row doubles the resolution of the previous one.
    pub fn observed_orders(&self) -> Vec<f64> {
        self.convergence
            .windows(2)
            .map(|w| (w[0].relative_residual / w[1].relative_residual).log2())
            .collect()
    }

    /// Pretty JSON; key order is fixed so identical reports serialise identically.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

pub fn relative_residual(residual: f64, normalizer: f64) -> f64 {
    residual.abs() / normalizer.abs().max(1e-300)
}
