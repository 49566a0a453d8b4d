//! Machine-readable run reports: every command emits one JSON document with
//! a fixed schema listing the checks it performed.

use crate::Result;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.into(),
            params: serde_json::json!({}),
            seed: 0,
            checks: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn with_params(mut self, params: serde_json::Value) -> Self {
        self.params = params;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Record a check that passes when `value <= tolerance`.
    pub fn check_le(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> bool {
        let pass = value.is_finite() && value <= tolerance;
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
            pass,
        });
        pass
    }

    /// Record a check that passes when `value >= tolerance` (separations,
    /// negative controls).
    pub fn check_ge(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> bool {
        let pass = value.is_finite() && value >= tolerance;
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
            pass,
        });
        pass
    }

    pub fn add_artifact(&mut self, path: impl Into<String>) {
        self.artifacts.push(path.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Process exit code: 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trip_and_pass_logic() {
        let mut r = Report::new("flatness")
            .with_params(serde_json::json!({"t": [0.7, 0.3]}))
            .with_seed(42);
        assert!(r.check_le("max_curvature", 1e-12, 1e-10));
        assert!(r.check_ge("negative_control", 0.05, 1e-2));
        assert!(r.all_pass());
        assert_eq!(r.exit_code(), 0);
        r.check_le("failing", 1.0, 1e-10);
        assert!(!r.all_pass());
        assert_eq!(r.exit_code(), 1);
        let s = r.to_json().unwrap();
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back.schema, SCHEMA_VERSION);
        assert_eq!(back.checks.len(), 3);
        assert_eq!(back.seed, 42);
    }
}
