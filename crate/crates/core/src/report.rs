//! Pass/fail reports shared by every verifier.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub target: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn new(target: impl Into<String>) -> Self {
        VerifyReport { target: target.into(), ..Default::default() }
    }

    pub fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check { name: name.into(), status, detail: detail.into() });
    }

    pub fn skip(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), status: Status::Skip, detail: detail.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn extend(&mut self, other: VerifyReport) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    /// No failed checks. Skips do not count against the report.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verify {}", self.target)?;
        for c in &self.checks {
            if c.detail.is_empty() {
                writeln!(f, "  [{}] {}", c.status, c.name)?;
            } else {
                writeln!(f, "  [{}] {}: {}", c.status, c.name, c.detail)?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        write!(f, "result: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_and_fail() {
        let mut r = VerifyReport::new("demo");
        r.push("a", true, "");
        r.skip("b", "not applicable");
        assert!(r.passed());
        r.push("c", false, "counterexample S={1}");
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        let text = r.to_string();
        assert!(text.contains("[FAIL] c: counterexample S={1}"));
        assert!(r.to_json().contains("\"status\": \"skip\""));
    }
}
