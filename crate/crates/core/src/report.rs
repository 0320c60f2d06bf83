//! Residual reports shared by every verification step.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One named residual and the threshold it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Ordered list of checks. `pass` holds iff every residual is finite and at
/// or below its threshold.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport {
            checks: Vec::new(),
            pass: true,
        }
    }

    pub fn record(&mut self, name: impl Into<String>, residual: f64, threshold: f64) -> bool {
        let pass = residual.is_finite() && residual <= threshold;
        self.checks.push(Check {
            name: name.into(),
            residual,
            threshold,
            pass,
        });
        self.pass &= pass;
        pass
    }

    /// Records a check that could not be evaluated (an upstream stage failed).
    pub fn record_failure(&mut self, name: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            residual: f64::INFINITY,
            threshold: 0.0,
            pass: false,
        });
        self.pass = false;
    }

    /// Appends all checks of `other`, prefixing their names with `stage/`.
    pub fn absorb(&mut self, stage: &str, other: ValidationReport) {
        for c in other.checks {
            self.pass &= c.pass;
            self.checks.push(Check {
                name: format!("{stage}/{}", c.name),
                ..c
            });
        }
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<48} residual={:.3e} threshold={:.3e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.threshold
            )?;
        }
        write!(f, "overall: {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_flag_tracks_every_check() {
        let mut r = ValidationReport::new();
        assert!(r.pass);
        r.record("small", 1e-14, 1e-10);
        assert!(r.pass);
        r.record("large", 1.0, 1e-10);
        assert!(!r.pass);
        assert_eq!(r.first_failure().unwrap().name, "large");
    }

    #[test]
    fn nan_residual_fails() {
        let mut r = ValidationReport::new();
        assert!(!r.record("nan", f64::NAN, 1.0));
        assert!(!r.pass);
    }

    #[test]
    fn absorb_prefixes_names() {
        let mut inner = ValidationReport::new();
        inner.record("x", 0.0, 1.0);
        let mut outer = ValidationReport::new();
        outer.absorb("stage", inner);
        assert_eq!(outer.checks[0].name, "stage/x");
        assert!(outer.pass);
    }
}
