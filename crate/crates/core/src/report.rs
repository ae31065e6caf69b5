//! Report documents and their serialization.
//!
//! JSON has no infinities or NaN, so non-finite numbers are written as the
//! strings `"inf"`, `"-inf"` and `"nan"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::inequalities::InequalityReport;

pub fn num<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn num_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => num(v, s),
        None => s.serialize_none(),
    }
}

pub fn num_map<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &Num(*v))?;
    }
    map.end()
}

/// `f64` wrapper serialized through [`num`].
#[derive(Clone, Copy, Debug)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        num(&self.0, s)
    }
}

/// Formats a float for CSV with round-trip precision.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunInfo {
    pub seed: u64,
    pub resolution: usize,
    #[serde(serialize_with = "num")]
    pub tolerance: f64,
    pub suite: String,
    /// SHA-256 of the serialized results.
    pub hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub run: RunInfo,
    pub summary: Summary,
    pub results: Vec<InequalityReport>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub report_only: usize,
    pub degenerate: usize,
}

impl Report {
    pub fn new(seed: u64, resolution: usize, tolerance: f64, suite: &str, results: Vec<InequalityReport>) -> Self {
        let mut summary = Summary { total: results.len(), ..Default::default() };
        for r in &results {
            if r.report_only {
                summary.report_only += 1;
            } else if r.pass {
                summary.passed += 1;
            } else {
                summary.failed += 1;
            }
            if r.degenerate {
                summary.degenerate += 1;
            }
        }
        let body = serde_json::to_vec(&results).expect("reports serialize");
        let hash = hex::encode(Sha256::digest(&body));
        Report {
            run: RunInfo { seed, resolution, tolerance, suite: suite.to_string(), hash },
            summary,
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Writes `report.json` and one `curves/<case>.csv` per result with a curve.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        let curves: Vec<&InequalityReport> = self.results.iter().filter(|r| !r.curve.is_empty()).collect();
        if !curves.is_empty() {
            let cdir = dir.join("curves");
            std::fs::create_dir_all(&cdir)?;
            for r in curves {
                std::fs::write(cdir.join(format!("{}.csv", r.case_id())), r.curve_csv())?;
            }
        }
        Ok(())
    }
}

/// Writes a CSV with header `r,lhs,rhs,ratio`.
pub fn curve_csv(rows: &[crate::inequalities::CurveRow]) -> String {
    let mut out = String::from("r,lhs,rhs,ratio\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{},{}", fmt_num(row.r), fmt_num(row.lhs), fmt_num(row.rhs), fmt_num(row.ratio));
    }
    out
}
