//! Verification and experiment reports with JSON and CSV output.
//!
//! Output is a pure function of the report contents: maps are sorted and
//! floats use the shortest round-trip representation.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::scalar::Rational;

/// A single side of a check or a named statistic.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Exact(Rational),
    Real(f64),
    Count(i64),
    Flag(bool),
}

impl Quantity {
    pub fn to_json(&self) -> Value {
        match self {
            Quantity::Exact(r) => {
                json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
            }
            Quantity::Real(x) if x.is_finite() => json!(x),
            Quantity::Real(x) => json!(x.to_string()),
            Quantity::Count(n) => json!(n),
            Quantity::Flag(b) => json!(b),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Quantity::Exact(r) => crate::scalar::rational_to_f64(r),
            Quantity::Real(x) => *x,
            Quantity::Count(n) => *n as f64,
            Quantity::Flag(b) => f64::from(u8::from(*b)),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Exact(r) if r.denom() == &1.into() => write!(f, "{}", r.numer()),
            Quantity::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Quantity::Real(x) => write!(f, "{x}"),
            Quantity::Count(n) => write!(f, "{n}"),
            Quantity::Flag(b) => write!(f, "{b}"),
        }
    }
}

impl From<Rational> for Quantity {
    fn from(r: Rational) -> Self {
        Quantity::Exact(r)
    }
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Real(x)
    }
}

impl From<i64> for Quantity {
    fn from(n: i64) -> Self {
        Quantity::Count(n)
    }
}

impl From<usize> for Quantity {
    fn from(n: usize) -> Self {
        Quantity::Count(n as i64)
    }
}

impl From<bool> for Quantity {
    fn from(b: bool) -> Self {
        Quantity::Flag(b)
    }
}

/// `lhs` against `rhs`, with the verdict fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub pass: bool,
}

impl Check {
    pub fn new(
        id: impl Into<String>,
        lhs: impl Into<Quantity>,
        rhs: impl Into<Quantity>,
        pass: bool,
    ) -> Self {
        Check {
            id: id.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            pass,
        }
    }

    /// Exact equality of two rationals.
    pub fn exact(id: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        let pass = lhs == rhs;
        Check::new(id, lhs, rhs, pass)
    }

    /// `lhs ≤ rhs`; NaN fails.
    pub fn at_most(id: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check::new(id, lhs, rhs, lhs <= rhs)
    }

    /// `lhs ≥ rhs`; NaN fails.
    pub fn at_least(id: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check::new(id, lhs, rhs, lhs >= rhs)
    }

    /// `|lhs − rhs| ≤ tol`.
    pub fn close(id: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Check::new(id, lhs, rhs, (lhs - rhs).abs() <= tol)
    }

    pub fn equal_counts(id: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Check::new(id, lhs, rhs, lhs == rhs)
    }

    pub fn to_json(&self) -> Value {
        json!({"id": self.id, "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(), "pass": self.pass})
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {} vs {}", self.id, self.lhs, self.rhs)
    }
}

/// Outcome of a verification or experiment, reproducible from
/// `(name, params, seed)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub stats: BTreeMap<String, Quantity>,
}

/// Reports from the scaling experiments carry statistics and distances in
/// `stats` and their thresholds as checks.
pub type ExperimentReport = Report;

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn stat(&mut self, key: impl Into<String>, value: impl Into<Quantity>) {
        self.stats.insert(key.into(), value.into());
    }

    /// Appends everything in `other` with keys prefixed by `"{other.name}."`;
    /// distinct names keep keys unique.
    pub fn absorb(&mut self, other: Report) {
        for (k, v) in other.params {
            self.params.insert(format!("{}.{k}", other.name), v);
        }
        for (k, v) in other.stats {
            self.stats.insert(format!("{}.{k}", other.name), v);
        }
        for mut c in other.checks {
            c.id = format!("{}.{}", other.name, c.id);
            self.checks.push(c);
        }
    }

    /// True iff every check passed; an empty report passes.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Value {
        let stats: Map<String, Value> = self
            .stats
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        json!({
            "name": self.name,
            "params": self.params,
            "seed": self.seed,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "stats": stats,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report values serialize");
        s.push('\n');
        s
    }

    /// One row per check: `check_id, lhs, rhs, pass`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_id", "lhs", "rhs", "pass"])
            .expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                c.id.clone(),
                c.lhs.to_string(),
                c.rhs.to_string(),
                c.pass.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    /// One line per check followed by a verdict line.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{}: {c}\n", self.name));
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "{}: {} checks, {} failed\n",
            self.name,
            self.checks.len(),
            failed
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn absorb_prefixes_ids_and_stats() {
        let mut inner = Report::new("inner");
        inner.push(Check::equal_counts("x", 1, 2));
        inner.stat("s", 0.5);
        let mut outer = Report::new("outer");
        outer.absorb(inner);
        assert_eq!(outer.checks[0].id, "inner.x");
        assert!(outer.stats.contains_key("inner.s"));
        assert!(!outer.passed());
    }

    #[test]
    fn json_and_csv_shapes() {
        let mut r = Report::new("demo").param("n", 3).with_seed(7);
        r.push(Check::exact("eq", rat(1, 4), rat(2, 8)));
        r.push(Check::at_most("ks", 0.5, 0.25));
        r.stat("mean", 0.125);
        assert!(!r.passed());
        let v = r.to_json();
        assert_eq!(v["checks"][0]["lhs"], json!({"num": "1", "den": "4"}));
        assert_eq!(v["checks"][1]["pass"], json!(false));
        assert_eq!(v["seed"], json!(7));
        assert_eq!(v["stats"]["mean"], json!(0.125));
        let csv = r.to_csv();
        assert_eq!(
            csv,
            "check_id,lhs,rhs,pass\neq,1/4,1/4,true\nks,0.5,0.25,false\n"
        );
    }

    #[test]
    fn nan_fails_comparisons() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).pass);
        assert!(!Check::close("x", f64::NAN, 1.0, 1.0).pass);
        assert_eq!(Quantity::Real(f64::INFINITY).to_json(), json!("inf"));
    }
}
