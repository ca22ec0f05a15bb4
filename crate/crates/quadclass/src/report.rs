//! Theorem reports and their table and JSON renderings.

use std::fmt::Write as _;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// Bumped whenever the JSON layout changes; see `docs/report-schema.md`.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Outside the caps or the hypotheses; never computed.
    Skipped,
    /// The claim does not apply to this point (e.g. an exceptional family).
    Exempt,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Exempt => "exempt",
        }
    }
}

/// Named integer parameters, kept in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Params(pub Vec<(&'static str, i64)>);

impl Params {
    pub fn new() -> Self {
        Params(Vec::new())
    }

    pub fn with(mut self, name: &'static str, value: impl TryInto<i64>) -> Self {
        let value = value.try_into().unwrap_or(i64::MAX);
        self.0.push((name, value));
        self
    }

    fn sort_key(&self) -> Vec<i64> {
        self.0.iter().map(|&(_, v)| v).collect()
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, (name, value)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (name, value) in &self.0 {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case {
    pub params: Params,
    pub expected: String,
    pub observed: String,
    pub status: Status,
    /// True when a failure contradicts the claim rather than marking an
    /// allowed exception.
    #[serde(skip)]
    pub counterexample: bool,
}

impl Case {
    pub fn new(params: Params, expected: impl Into<String>) -> Self {
        Case {
            params,
            expected: expected.into(),
            observed: String::new(),
            status: Status::Skipped,
            counterexample: false,
        }
    }

    pub fn skipped(mut self, why: impl Into<String>) -> Self {
        self.observed = why.into();
        self.status = Status::Skipped;
        self
    }

    pub fn exempt(mut self, why: impl Into<String>) -> Self {
        self.observed = why.into();
        self.status = Status::Exempt;
        self
    }

    /// Records the outcome; a failing case is a counterexample.
    pub fn judged(mut self, observed: impl Into<String>, pass: bool) -> Self {
        self.observed = observed.into();
        self.status = if pass { Status::Pass } else { Status::Fail };
        self.counterexample = !pass;
        self
    }

    /// Records the outcome; a failure is allowed by the claim.
    pub fn judged_allowing_exceptions(self, observed: impl Into<String>, pass: bool) -> Self {
        let mut case = self.judged(observed, pass);
        case.counterexample = false;
        case
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub exempt: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub params: Params,
    pub observed: String,
}

/// Whether the report settles its claim on the grid or only samples it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Exact,
    Windowed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub schema_version: u32,
    pub theorem_id: String,
    pub claim: String,
    pub evidence: Evidence,
    pub grid: serde_json::Value,
    pub caps: serde_json::Value,
    pub cases: Vec<Case>,
    pub summary: Summary,
    pub counterexamples: Vec<Counterexample>,
    /// Parameters where an allowed exception was observed. Only present for
    /// claims that permit finitely many exceptions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exceptional_set: Option<Vec<Params>>,
}

impl TheoremReport {
    /// Sorts `cases` by parameter values and derives the summary and lists.
    pub fn assemble(
        theorem_id: &str,
        claim: &str,
        evidence: Evidence,
        grid: serde_json::Value,
        caps: serde_json::Value,
        mut cases: Vec<Case>,
        tracks_exceptions: bool,
    ) -> Self {
        cases.sort_by_cached_key(|c| c.params.sort_key());
        let mut summary = Summary::default();
        for case in &cases {
            match case.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skipped => summary.skipped += 1,
                Status::Exempt => summary.exempt += 1,
            }
        }
        let counterexamples = cases
            .iter()
            .filter(|c| c.counterexample)
            .map(|c| Counterexample {
                params: c.params.clone(),
                observed: c.observed.clone(),
            })
            .collect();
        let exceptional_set = tracks_exceptions.then(|| {
            cases
                .iter()
                .filter(|c| c.status == Status::Fail && !c.counterexample)
                .map(|c| c.params.clone())
                .collect()
        });
        TheoremReport {
            schema_version: REPORT_SCHEMA_VERSION,
            theorem_id: theorem_id.to_string(),
            claim: claim.to_string(),
            evidence,
            grid,
            caps,
            cases,
            summary,
            counterexamples,
            exceptional_set,
        }
    }

    pub fn has_counterexample(&self) -> bool {
        !self.counterexamples.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.theorem_id, self.claim);
        if self.evidence == Evidence::Windowed {
            let _ = writeln!(out, "(windowed evidence over the grid below, not a proof)");
        }
        let rows: Vec<[String; 4]> = self
            .cases
            .iter()
            .map(|c| {
                [
                    c.params.to_string(),
                    c.expected.clone(),
                    c.observed.clone(),
                    c.status.as_str().to_string(),
                ]
            })
            .collect();
        let header = ["params", "expected", "observed", "status"];
        let mut widths = header.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut line = |cells: [&str; 4]| {
            let mut s = String::new();
            for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                let pad = w - cell.chars().count();
                s.push_str(cell);
                if i < 3 {
                    s.extend(std::iter::repeat_n(' ', pad));
                }
            }
            let _ = writeln!(out, "{}", s.trim_end());
        };
        line(header);
        for row in &rows {
            line([&row[0], &row[1], &row[2], &row[3]]);
        }
        let s = self.summary;
        let _ = writeln!(
            out,
            "summary: {} pass, {} fail, {} skipped, {} exempt",
            s.pass, s.fail, s.skipped, s.exempt
        );
        if let Some(set) = &self.exceptional_set {
            let shown: Vec<String> = set.iter().map(|p| format!("({p})")).collect();
            let _ = writeln!(out, "observed exceptional set: {{{}}}", shown.join(", "));
        }
        for c in &self.counterexamples {
            let _ = writeln!(out, "COUNTEREXAMPLE {}: {}", c.params, c.observed);
        }
        out
    }
}
