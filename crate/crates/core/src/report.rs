//! Report rows and the CSV wire format.
//!
//! The column order is fixed so reports diff cleanly in CI. Wall times
//! are left empty unless explicitly requested: identical configurations
//! must byte-reproduce their reports.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    BoundOnly,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
            Verdict::BoundOnly => "bound-only",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub suite: String,
    pub statement: String,
    pub instance: String,
    pub verdict: Verdict,
    pub witness: String,
    pub wall_ms: Option<u128>,
}

impl ReportRow {
    pub fn new(
        suite: &str,
        statement: &str,
        instance: &str,
        verdict: Verdict,
        witness: impl Into<String>,
    ) -> Self {
        ReportRow {
            suite: suite.into(),
            statement: statement.into(),
            instance: instance.into(),
            verdict,
            witness: witness.into(),
            wall_ms: None,
        }
    }

    pub fn pass(suite: &str, statement: &str, instance: &str) -> Self {
        Self::new(suite, statement, instance, Verdict::Pass, "")
    }

    pub fn fail(suite: &str, statement: &str, instance: &str, witness: impl Into<String>) -> Self {
        Self::new(suite, statement, instance, Verdict::Fail, witness)
    }

    pub fn skipped(suite: &str, statement: &str, instance: &str, reason: impl Into<String>) -> Self {
        Self::new(suite, statement, instance, Verdict::Skipped, reason)
    }

    pub fn check(
        suite: &str,
        statement: &str,
        instance: &str,
        ok: bool,
        witness: impl Into<String>,
    ) -> Self {
        if ok {
            Self::pass(suite, statement, instance)
        } else {
            Self::fail(suite, statement, instance, witness)
        }
    }
}

fn escape_csv(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "suite,statement,instance,verdict,witness,wall_ms";

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let wall = r.wall_ms.map(|w| w.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            escape_csv(&r.suite),
            escape_csv(&r.statement),
            escape_csv(&r.instance),
            r.verdict,
            escape_csv(&r.witness),
            wall
        ));
    }
    out
}

/// 0 all pass, 1 any fail, 3 bound-only rows present (and no failures).
pub fn exit_code(rows: &[ReportRow]) -> i32 {
    if rows.iter().any(|r| r.verdict == Verdict::Fail) {
        1
    } else if rows.iter().any(|r| r.verdict == Verdict::BoundOnly) {
        3
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_escaping_and_exit_codes() {
        let rows = vec![
            ReportRow::pass("s", "ok", "inst"),
            ReportRow::fail("s", "bad", "inst", "value 1, expected 2"),
        ];
        let csv = to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.contains("\"value 1, expected 2\""));
        assert_eq!(exit_code(&rows), 1);
        assert_eq!(exit_code(&rows[..1]), 0);
        let bound = vec![ReportRow::new("s", "b", "i", Verdict::BoundOnly, "")];
        assert_eq!(exit_code(&bound), 3);
    }
}
