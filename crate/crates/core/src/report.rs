//! Pass/fail records shared by validation and the identity suites.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Offending index tuple and residual for failures.
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), passed: true, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check { name: name.into(), passed: false, witness: Some(witness.into()) }
    }

    pub fn from_result(name: impl Into<String>, r: Result<(), String>) -> Self {
        match r {
            Ok(()) => Check::pass(name),
            Err(w) => Check::fail(name, w),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

/// The validation report for a structure.
pub type ValidationReport = Report;

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn summary(&self) -> String {
        alloc::format!("{}/{} checks passed", self.passed_count(), self.checks.len())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            write!(f, "{status}  {}", c.name)?;
            if let Some(w) = &c.witness {
                write!(f, "  [{w}]")?;
            }
            writeln!(f)?;
        }
        write!(f, "{}", self.summary())
    }
}
