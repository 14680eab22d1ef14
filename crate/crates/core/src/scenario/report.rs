use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::commutant::ReportRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// A per-grade dimension comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub grade: u32,
    pub lhs: usize,
    pub rhs: usize,
    pub ok: bool,
}

impl From<&ReportRow> for Row {
    fn from(r: &ReportRow) -> Self {
        Row { grade: r.grade, lhs: r.lhs, rhs: r.rhs, ok: r.ok }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub optional: bool,
    pub detail: String,
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Graded dimensions of a named space or series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimTable {
    pub name: String,
    pub dims: Vec<usize>,
}

/// Result of running a scenario. Everything except `elapsed` fields is a
/// deterministic function of the scenario and the flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub engine: String,
    pub version: String,
    pub scenario_hash: String,
    pub max_weight: u32,
    pub checks: Vec<CheckResult>,
    pub dims: Vec<DimTable>,
    pub passed: usize,
    pub failed: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    /// Whether every required check passed.
    pub fn success(&self) -> bool {
        self.checks.iter().all(|c| c.passed() || c.optional)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The machine-readable section: timings excluded.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with a trailing `timings` object, for tooling.
    pub fn to_json_with_timings(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        let timings: serde_json::Map<String, serde_json::Value> = self
            .checks
            .iter()
            .map(|c| (c.name.clone(), serde_json::json!(c.elapsed.as_secs_f64())))
            .collect();
        v["timings"] = serde_json::Value::Object(timings);
        v["total_seconds"] = serde_json::json!(self.elapsed.as_secs_f64());
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    /// Plain text without timings.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s += &format!("{} {}\n", self.engine, self.version);
        s += &format!("scenario {}\n", self.scenario_hash);
        s += &format!("max-weight {}\n", self.max_weight);
        for c in &self.checks {
            let opt = if c.optional { " (optional)" } else { "" };
            s += &format!("{} {}{opt}: {}", c.status, c.name, c.kind);
            if !c.detail.is_empty() {
                s += &format!(" -- {}", c.detail);
            }
            s.push('\n');
            for r in &c.rows {
                s += &format!(
                    "  check={} grade={} lhs={} rhs={} status={}\n",
                    c.name,
                    r.grade,
                    r.lhs,
                    r.rhs,
                    if r.ok { "OK" } else { "FAIL" }
                );
            }
        }
        if !self.dims.is_empty() {
            s += "dimensions\n";
            for t in &self.dims {
                let d: Vec<String> = t.dims.iter().map(|x| x.to_string()).collect();
                s += &format!("  {}: {}\n", t.name, d.join(" "));
            }
        }
        s += &format!("summary: {} passed, {} failed\n", self.passed, self.failed);
        s
    }

    pub fn timings_text(&self) -> String {
        let mut s = String::from("timings\n");
        for c in &self.checks {
            s += &format!("  {}: {:.3}s\n", c.name, c.elapsed.as_secs_f64());
        }
        s += &format!("  total: {:.3}s\n", self.elapsed.as_secs_f64());
        s
    }
}
