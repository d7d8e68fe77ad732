use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;
/// Violations kept verbatim in a report; the count is always exact.
pub const VIOLATION_LIMIT: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    pub passed: bool,
    pub summary: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub name: String,
    pub verified: bool,
    pub summary: String,
    pub data: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub results: Vec<CheckResult>,
    pub violations: Vec<Value>,
    pub certificates: Vec<Certificate>,
    pub ok: bool,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        Report {
            schema: SCHEMA,
            tool: "nicetop",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            results: vec![],
            violations: vec![],
            certificates: vec![],
            ok: true,
            timing: Timing { total_ms: 0 },
        }
    }

    pub fn check(&mut self, name: impl Into<String>, checked: usize, violations: usize, summary: impl Into<String>) {
        let passed = violations == 0;
        self.ok &= passed;
        self.results.push(CheckResult { name: name.into(), checked, violations, passed, summary: summary.into() });
    }

    pub fn violation(&mut self, v: impl Serialize) {
        if self.violations.len() < VIOLATION_LIMIT {
            self.violations.push(serde_json::to_value(v).expect("violations serialize"));
        }
    }

    pub fn certificate(&mut self, name: impl Into<String>, verified: bool, summary: impl Into<String>, data: impl Serialize) {
        self.ok &= verified;
        let data = serde_json::to_value(data).expect("certificates serialize");
        self.certificates.push(Certificate { name: name.into(), verified, summary: summary.into(), data });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mark = |ok: bool| if ok { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "{} {} {}", self.tool, self.version, self.command);
        for r in &self.results {
            let _ =
                writeln!(s, "  {} {}: {} ({} checks, {} violations)", mark(r.passed), r.name, r.summary, r.checked, r.violations);
        }
        if !self.certificates.is_empty() {
            let _ = writeln!(s, "certificates:");
            for c in &self.certificates {
                let _ = writeln!(s, "  {} {}: {}", mark(c.verified), c.name, c.summary);
            }
        }
        for v in &self.violations {
            let _ = writeln!(s, "  violation: {v}");
        }
        let verdict = if self.ok { "ok" } else { "FAILED" };
        let _ = writeln!(s, "result: {verdict} [{} ms]", self.timing.total_ms);
        s
    }
}
