use std::fmt;
use std::path::PathBuf;

/// One embedded pass/fail check.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

/// What a command prints and writes.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<PathBuf>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn merge(&mut self, other: Report) {
        self.lines.extend(other.lines);
        self.notes.extend(other.notes);
        self.checks.extend(other.checks);
        self.artifacts.extend(other.artifacts);
    }
}
