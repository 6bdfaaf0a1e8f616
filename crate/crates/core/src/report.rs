//! Residual reports: one entry per (identity, n), zero or the offending residual.

use serde_json::{json, Map, Value};

use crate::exactnum::Gq;
use crate::laurent::Laurent;
use crate::polymat::{MatPoly, Matrix};

#[derive(Clone, Debug)]
pub enum Residual {
    Zero,
    Scalar(Gq),
    Matrix(Matrix),
    Poly(MatPoly),
    Series(Laurent),
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        matches!(self, Residual::Zero)
    }

    fn to_json(&self) -> Value {
        match self {
            Residual::Zero => json!("zero"),
            Residual::Scalar(s) => json!(s.to_string()),
            Residual::Matrix(m) => json!({"shape": [m.rows(), m.cols()], "coeffs": [m.to_json()]}),
            Residual::Poly(p) => p.to_json(),
            Residual::Series(s) => s.to_json(),
        }
    }
}

impl From<Matrix> for Residual {
    fn from(m: Matrix) -> Self {
        if m.is_zero() { Residual::Zero } else { Residual::Matrix(m) }
    }
}

impl From<MatPoly> for Residual {
    fn from(p: MatPoly) -> Self {
        if p.is_zero() { Residual::Zero } else { Residual::Poly(p) }
    }
}

impl From<Laurent> for Residual {
    fn from(s: Laurent) -> Self {
        if s.is_zero() { Residual::Zero } else { Residual::Series(s) }
    }
}

impl From<Gq> for Residual {
    fn from(s: Gq) -> Self {
        if num_traits::Zero::is_zero(&s) { Residual::Zero } else { Residual::Scalar(s) }
    }
}

/// How an entry participates in the pass/fail verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    /// Counted toward pass/fail.
    Main,
    /// Index-boundary cases that depend on the `C_{-1} := 0` convention; counted, listed apart.
    Convention,
    /// Characterization only (e.g. a literal form known not to hold); never affects the verdict.
    Informational,
}

#[derive(Clone, Debug)]
pub struct ResidualEntry {
    pub identity: String,
    pub n: i64,
    pub residual: Residual,
    pub section: Section,
    pub note: Option<String>,
}

impl ResidualEntry {
    pub fn new(identity: impl Into<String>, n: i64, residual: impl Into<Residual>) -> Self {
        Self { identity: identity.into(), n, residual: residual.into(), section: Section::Main, note: None }
    }

    pub fn convention(mut self) -> Self {
        self.section = Section::Convention;
        self
    }

    pub fn informational(mut self) -> Self {
        self.section = Section::Informational;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn pass(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("identity".into(), json!(self.identity));
        m.insert("n".into(), json!(self.n));
        m.insert("residual".into(), self.residual.to_json());
        m.insert("pass".into(), json!(self.pass()));
        let section = match self.section {
            Section::Main => "main",
            Section::Convention => "convention",
            Section::Informational => "informational",
        };
        m.insert("section".into(), json!(section));
        if let Some(note) = &self.note {
            m.insert("note".into(), json!(note));
        }
        Value::Object(m)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ResidualReport {
    pub suite: String,
    pub entries: Vec<ResidualEntry>,
    pub skipped: Option<String>,
    pub error: Option<String>,
}

impl ResidualReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), ..Default::default() }
    }

    pub fn skipped(suite: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { suite: suite.into(), skipped: Some(reason.into()), ..Default::default() }
    }

    pub fn failed(suite: impl Into<String>, error: impl Into<String>) -> Self {
        Self { suite: suite.into(), error: Some(error.into()), ..Default::default() }
    }

    pub fn push(&mut self, e: ResidualEntry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.entries.extend(other.entries);
    }

    pub fn counted(&self) -> impl Iterator<Item = &ResidualEntry> {
        self.entries.iter().filter(|e| e.section != Section::Informational)
    }

    pub fn pass(&self) -> bool {
        self.error.is_none() && self.counted().all(ResidualEntry::pass)
    }

    pub fn failures(&self) -> Vec<&ResidualEntry> {
        self.counted().filter(|e| !e.pass()).collect()
    }

    pub fn to_json(&self) -> Value {
        let status = if self.skipped.is_some() {
            "skipped"
        } else if self.pass() {
            "pass"
        } else {
            "fail"
        };
        let mut m = Map::new();
        m.insert("suite".into(), json!(self.suite));
        m.insert("status".into(), json!(status));
        if let Some(r) = &self.skipped {
            m.insert("reason".into(), json!(format!("skipped: {r}")));
        }
        if let Some(e) = &self.error {
            m.insert("error".into(), json!(e));
        }
        m.insert("entries".into(), Value::from(self.entries.iter().map(ResidualEntry::to_json).collect::<Vec<_>>()));
        Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn informational_entries_do_not_fail_a_report() {
        let mut r = ResidualReport::new("demo");
        r.push(ResidualEntry::new("ok", 1, Matrix::zeros(2, 2)));
        r.push(ResidualEntry::new("literal", 1, Matrix::identity(2)).informational());
        assert!(r.pass());
        r.push(ResidualEntry::new("bad", 2, Matrix::identity(2)).convention());
        assert!(!r.pass());
        assert_eq!(r.failures().len(), 1);
        let v = r.to_json();
        assert_eq!(v["status"], "fail");
        assert_eq!(v["entries"][0]["residual"], "zero");
    }
}
