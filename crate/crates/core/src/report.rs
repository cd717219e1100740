//! Check records and reports shared by every verification routine.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

/// One verified statement: what was expected, what was computed, and modulo what.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The statement being verified, written as a formula.
    pub anchor: String,
    pub status: Status,
    pub expected: String,
    pub computed: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, ok: bool) -> Self {
        CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            status: Status::from_bool(ok),
            expected: String::new(),
            computed: String::new(),
            modulus: None,
            witness: None,
            runtime_ms: None,
        }
    }

    /// Record comparing two printed values for equality.
    pub fn compare(id: impl Into<String>, anchor: impl Into<String>, expected: impl ToString, computed: impl ToString) -> Self {
        let (e, c) = (expected.to_string(), computed.to_string());
        let mut r = Self::new(id, anchor, e == c);
        r.expected = e;
        r.computed = c;
        r
    }

    pub fn expected(mut self, s: impl ToString) -> Self {
        self.expected = s.to_string();
        self
    }

    pub fn computed(mut self, s: impl ToString) -> Self {
        self.computed = s.to_string();
        self
    }

    pub fn modulus(mut self, s: impl ToString) -> Self {
        self.modulus = Some(s.to_string());
        self
    }

    pub fn witness(mut self, s: impl ToString) -> Self {
        self.witness = Some(s.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: BTreeMap<String, String>,
    pub status: Status,
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new(config: BTreeMap<String, String>, records: Vec<CheckRecord>) -> Self {
        let status = Status::from_bool(records.iter().all(CheckRecord::passed));
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            status,
            records,
        }
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Aligned human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let cfg: Vec<String> = self.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "bpcalc {} (schema {})  {}", self.tool_version, self.schema_version, cfg.join(" "));
        let width = self.records.iter().map(|r| r.id.len()).max().unwrap_or(0);
        for r in &self.records {
            let tag = if r.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag}  {:width$}  {}", r.id, r.anchor);
            let pad = " ".repeat(width + 6);
            if !r.expected.is_empty() {
                let _ = writeln!(out, "{pad}expected: {}", r.expected);
            }
            if !r.computed.is_empty() {
                let _ = writeln!(out, "{pad}computed: {}", r.computed);
            }
            if let Some(m) = &r.modulus {
                let _ = writeln!(out, "{pad}modulo:   {m}");
            }
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "{pad}witness:  {w}");
            }
            if let Some(t) = r.runtime_ms {
                let _ = writeln!(out, "{pad}time:     {t} ms");
            }
        }
        let passed = self.records.iter().filter(|r| r.passed()).count();
        let _ = writeln!(
            out,
            "{}: {passed}/{} checks passed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.records.len()
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_status() {
        let mut cfg = BTreeMap::new();
        cfg.insert("prime".to_string(), "7".to_string());
        let recs = vec![
            CheckRecord::compare("a", "x = y", "1", "1").modulus("(p)"),
            CheckRecord::compare("b", "x = z", "1", "2").witness("t1"),
        ];
        let r = Report::new(cfg, recs);
        assert!(!r.passed());
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_text().contains("FAIL  b"));
    }
}
