use std::fmt;

/// One pass/fail assertion with the measured value and the bound it was held to.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, max: f64) -> Self {
        Self { name: name.into(), value, bound: format!("<= {max}"), pass: value <= max }
    }

    pub fn at_least(name: impl Into<String>, value: f64, min: f64) -> Self {
        Self { name: name.into(), value, bound: format!(">= {min}"), pass: value >= min }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), value, bound: format!("in [{lo}, {hi}]"), pass: value >= lo && value <= hi }
    }

    /// `|value − target| ≤ rel·|target|`
    pub fn relative(name: impl Into<String>, value: f64, target: f64, rel: f64) -> Self {
        let pass = (value - target).abs() <= rel * target.abs();
        Self { name: name.into(), value, bound: format!("{target} +- {}%", rel * 100.0), pass }
    }

    /// Informational row; never fails.
    pub fn report(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, bound: "reported".into(), pass: true }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {} ({})", self.name, self.value, self.bound)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
