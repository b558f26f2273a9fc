use std::fmt::Write as _;

use serde::Serialize;

/// One checked inequality `lhs ≥ rhs` (or the relation named by the report).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub x: String,
    pub lhs: String,
    pub rhs: String,
    pub witness: Option<String>,
    pub holds: bool,
}

/// Outcome of a machine-checked inequality over a grid. `pass` is true iff
/// every row holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub instance: String,
    pub relation: String,
    pub constants: Vec<(String, String)>,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(check: &str, instance: impl Into<String>, relation: &str) -> Self {
        VerificationReport {
            check: check.into(),
            instance: instance.into(),
            relation: relation.into(),
            constants: Vec::new(),
            rows: Vec::new(),
            pass: true,
        }
    }

    pub fn constant(&mut self, name: &str, value: impl ToString) {
        self.constants.push((name.into(), value.to_string()));
    }

    pub fn push(&mut self, row: ReportRow) {
        self.pass &= row.holds;
        self.rows.push(row);
    }

    pub fn constant_value(&self, name: &str) -> Option<&str> {
        self.constants.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    /// Stable text form: header fields, constants, then a tab-separated table.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "check: {}", self.check);
        let _ = writeln!(s, "instance: {}", self.instance);
        let _ = writeln!(s, "relation: {}", self.relation);
        for (k, v) in &self.constants {
            let _ = writeln!(s, "constant {k}: {v}");
        }
        let _ = writeln!(s, "pass: {}", self.pass);
        s.push_str("x\tlhs\trhs\twitness\tholds\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}",
                r.x,
                r.lhs,
                r.rhs,
                r.witness.as_deref().unwrap_or("-"),
                r.holds
            );
        }
        s
    }
}
