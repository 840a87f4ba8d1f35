//! Experiment reports in CSV and JSON form.
//!
//! CSV output starts with `#`-prefixed metadata lines, followed by a header
//! line of column names and one line per row. JSON output has the shape
//! `{experiment, params, seed, rows, summary, version}`, with rows given as
//! objects keyed by column name. The wall clock is written only when set.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: BTreeMap<String, Value>,
    pub version: String,
    pub wall_clock_s: Option<f64>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    experiment: &'a str,
    params: &'a BTreeMap<String, Value>,
    seed: Option<u64>,
    rows: Vec<Map<String, Value>>,
    summary: &'a BTreeMap<String, Value>,
    version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_clock_s: Option<f64>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, columns: &[&str]) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            params: BTreeMap::new(),
            seed: None,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_s: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.summary.insert(key.to_string(), value.into());
        self
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row has {} fields, expected {}",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let rows = self
            .rows
            .iter()
            .map(|r| self.columns.iter().cloned().zip(r.iter().cloned()).collect())
            .collect();
        let doc = JsonReport {
            experiment: &self.experiment,
            params: &self.params,
            seed: self.seed,
            rows,
            summary: &self.summary,
            version: &self.version,
            wall_clock_s: self.wall_clock_s,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# experiment: {}\n", self.experiment));
        out.push_str(&format!("# version: {}\n", self.version));
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed: {seed}\n"));
        }
        for (k, v) in &self.params {
            out.push_str(&format!("# param {k}: {}\n", plain(v)));
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary {k}: {}\n", plain(v)));
        }
        if let Some(t) = self.wall_clock_s {
            out.push_str(&format!("# wall_clock_s: {t}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(plain)).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
        out
    }
}

/// Strings without quotes, everything else in JSON notation.
fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("residue", &["class", "count"]);
        r.param("x", 1000).param("m", 2);
        r.seed = Some(7);
        r.push_row(vec![0.into(), 84.into()]).unwrap();
        r.push_row(vec![1.into(), 84.into()]).unwrap();
        r.summary("deviation", 0.0);
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
        assert!(lines[..header].iter().all(|l| l.starts_with('#')));
        assert_eq!(lines[header], "class,count");
        assert_eq!(&lines[header + 1..], &["0,84", "1,84"]);
        assert!(!csv.contains("wall_clock"));
    }

    #[test]
    fn json_layout() {
        let mut r = sample();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["experiment", "params", "seed", "rows", "summary", "version"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["rows"][1]["count"], 84);
        assert!(v.get("wall_clock_s").is_none());
        r.wall_clock_s = Some(1.5);
        assert!(r.to_json().contains("wall_clock_s"));
        assert_eq!(sample().to_json(), sample().to_json());
        assert!(r.push_row(vec![1.into()]).is_err());
    }
}
