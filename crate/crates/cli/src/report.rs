//! Report documents: per-point records, a summary derived from them, and
//! provenance. JSON schema version 1; CSV side-exports carry the records.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// (re, im) per chart coordinate.
    pub coords: Vec<[f64; 2]>,
    pub values: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub error: Option<String>,
}

impl Record {
    pub fn new(coords: Vec<[f64; 2]>) -> Self {
        Self { coords, values: BTreeMap::new(), flags: BTreeMap::new(), error: None }
    }

    pub fn failed(coords: Vec<[f64; 2]>, error: String) -> Self {
        Self { error: Some(error), ..Self::new(coords) }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.into(), v);
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.flags.insert(key.into(), v);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub version: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub points: usize,
    pub failures: usize,
    /// Maximum of every value column, except `min_eig` which keeps its minimum.
    pub extrema: BTreeMap<String, f64>,
    /// Count of records where each flag is false.
    pub flag_false: BTreeMap<String, usize>,
    /// Sign-change locations per ray, in ray parameter.
    pub boundaries: Vec<Vec<f64>>,
    pub passed: bool,
    pub checks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub command: String,
    pub config: String,
    pub provenance: Provenance,
    pub summary: Summary,
    pub records: Vec<Record>,
}

pub fn config_hash(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Column extrema and flag counts over the records.
pub fn summarize(records: &[Record], boundaries: Vec<Vec<f64>>) -> Summary {
    let mut extrema: BTreeMap<String, f64> = BTreeMap::new();
    let mut flag_false: BTreeMap<String, usize> = BTreeMap::new();
    for r in records {
        for (k, &v) in &r.values {
            let keep_min = k == "min_eig";
            extrema
                .entry(k.clone())
                .and_modify(|e| *e = if keep_min { e.min(v) } else { e.max(v) })
                .or_insert(v);
        }
        for (k, &v) in &r.flags {
            *flag_false.entry(k.clone()).or_default() += usize::from(!v);
        }
    }
    Summary {
        points: records.len(),
        failures: records.iter().filter(|r| r.error.is_some()).count(),
        extrema,
        flag_false,
        boundaries,
        passed: true,
        checks: Vec::new(),
    }
}

impl ReportDocument {
    pub fn write_json<W: Write>(&self, w: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, self)
    }

    /// One row per record: coordinates, sorted value and flag columns, error.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let n = self.records.first().map_or(0, |r| r.coords.len());
        let values: BTreeSet<&String> = self.records.iter().flat_map(|r| r.values.keys()).collect();
        let flags: BTreeSet<&String> = self.records.iter().flat_map(|r| r.flags.keys()).collect();
        let mut header: Vec<String> = (1..=n).flat_map(|k| [format!("re_q{k}"), format!("im_q{k}")]).collect();
        header.extend(values.iter().map(|s| s.to_string()));
        header.extend(flags.iter().map(|s| s.to_string()));
        header.push("error".into());
        out.write_record(&header)?;
        for r in &self.records {
            let mut row: Vec<String> = r.coords.iter().flat_map(|z| [format!("{:.17e}", z[0]), format!("{:.17e}", z[1])]).collect();
            row.extend(values.iter().map(|k| r.values.get(*k).map(|v| format!("{v:.17e}")).unwrap_or_default()));
            row.extend(flags.iter().map(|k| r.flags.get(*k).map(|v| v.to_string()).unwrap_or_default()));
            row.push(r.error.clone().unwrap_or_default());
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// One entry of a golden comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Diff {
    pub path: String,
    pub expected: String,
    pub actual: String,
}

impl std::fmt::Display for Diff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: expected {}, got {}", self.path, self.expected, self.actual)
    }
}

/// Entrywise comparison of two JSON documents. Numbers compare within the
/// tolerance registered for their key (or `default_tol`); everything else,
/// including the echoed config, must match exactly.
pub fn compare_json(expected: &Value, actual: &Value, default_tol: f64, fields: &BTreeMap<String, f64>) -> Vec<Diff> {
    let mut diffs = Vec::new();
    walk(expected, actual, "", None, default_tol, fields, &mut diffs);
    diffs
}

fn walk(e: &Value, a: &Value, path: &str, key: Option<&str>, tol: f64, fields: &BTreeMap<String, f64>, out: &mut Vec<Diff>) {
    let mismatch = |out: &mut Vec<Diff>| out.push(Diff { path: path.to_string(), expected: e.to_string(), actual: a.to_string() });
    match (e, a) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            let t = key.and_then(|k| fields.get(k)).copied().unwrap_or(tol);
            if !((x - y).abs() <= t * x.abs().max(1.0)) {
                mismatch(out);
            }
        }
        (Value::Array(xs), Value::Array(ys)) => {
            if xs.len() != ys.len() {
                mismatch(out);
                return;
            }
            for (k, (x, y)) in xs.iter().zip(ys).enumerate() {
                walk(x, y, &format!("{path}[{k}]"), key, tol, fields, out);
            }
        }
        (Value::Object(xs), Value::Object(ys)) => {
            for (k, x) in xs {
                match ys.get(k) {
                    Some(y) => walk(x, y, &format!("{path}.{k}"), Some(k), tol, fields, out),
                    None => out.push(Diff { path: format!("{path}.{k}"), expected: x.to_string(), actual: "missing".into() }),
                }
            }
            for k in ys.keys().filter(|k| !xs.contains_key(*k)) {
                out.push(Diff { path: format!("{path}.{k}"), expected: "missing".into(), actual: ys[k].to_string() });
            }
        }
        _ if e == a => {}
        _ => mismatch(out),
    }
}
