//! Experiment reports and their on-disk rendering.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::svg::loglog_plot;
use crate::HarnessError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    pub config_hash: String,
    pub seed: u64,
    pub pass: bool,
    /// Non-finite values are stored as `null`.
    pub metrics: BTreeMap<String, Option<f64>>,
    pub verdicts: BTreeMap<String, bool>,
    pub tables: BTreeMap<String, Table>,
    /// `(scale, value)` curves, written as CSV and plotted on log-log axes.
    pub profiles: BTreeMap<String, Vec<(f64, f64)>>,
    /// Files written next to `report.json`, relative to it.
    pub artifacts: Vec<String>,
    /// Wall-clock seconds; kept out of the canonical JSON.
    #[serde(skip)]
    pub runtime: f64,
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

impl Report {
    pub fn new(id: &str, config_hash: String, seed: u64) -> Self {
        Report { id: id.to_string(), config_hash, seed, ..Default::default() }
    }

    pub fn metric(&mut self, name: impl Into<String>, v: f64) {
        self.metrics.insert(name.into(), v.is_finite().then_some(v));
    }

    pub fn verdict(&mut self, name: impl Into<String>, pass: bool) {
        self.verdicts.insert(name.into(), pass);
    }

    /// Overall verdict: every recorded verdict passes (and there is one).
    pub fn finish(&mut self) {
        self.pass = !self.verdicts.is_empty() && self.verdicts.values().all(|&p| p);
        self.artifacts = self.artifact_names();
    }

    fn artifact_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for t in self.tables.keys() {
            names.push(format!("{}.csv", file_stem(t)));
        }
        for p in self.profiles.keys() {
            names.push(format!("profile_{}.csv", file_stem(p)));
            names.push(format!("profile_{}.svg", file_stem(p)));
        }
        names.sort();
        names
    }

    /// Sorted-key JSON, fully determined by the config and seed.
    pub fn canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json`, the CSV tables, profile CSVs and SVG plots into
    /// `dir/<id>/`; the runtime goes to `timing.json`.
    pub fn render(&self, dir: &Path) -> Result<PathBuf, HarnessError> {
        let root = dir.join(&self.id);
        fs::create_dir_all(&root)?;
        for (name, t) in &self.tables {
            fs::write(root.join(format!("{}.csv", file_stem(name))), t.to_csv())?;
        }
        for (name, pts) in &self.profiles {
            let stem = format!("profile_{}", file_stem(name));
            let mut csv = String::from("scale,value\n");
            for (r, v) in pts {
                csv.push_str(&format!("{r},{v}\n"));
            }
            fs::write(root.join(format!("{stem}.csv")), csv)?;
            fs::write(root.join(format!("{stem}.svg")), loglog_plot(&format!("{} {}", self.id, name), pts))?;
        }
        let path = root.join("report.json");
        fs::write(&path, self.canonical_json())?;
        fs::write(root.join("timing.json"), format!("{{\"runtime_seconds\":{}}}\n", self.runtime))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }
}

/// Reports in registry order followed by unknown ids, alphabetically.
pub fn merge(mut reports: Vec<Report>) -> Value {
    let rank = |id: &str| crate::REGISTRY.iter().position(|r| *r == id).unwrap_or(usize::MAX);
    reports.sort_by(|a, b| rank(&a.id).cmp(&rank(&b.id)).then_with(|| a.id.cmp(&b.id)));
    let pass = reports.iter().all(|r| r.pass);
    serde_json::json!({
        "pass": pass,
        "experiments": reports.iter().map(|r| serde_json::json!({
            "id": r.id,
            "pass": r.pass,
            "config_hash": r.config_hash,
            "verdicts": r.verdicts,
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_valid_json() {
        let mut r = Report::new("EXP-TEST", "00".into(), 1);
        r.tables.insert("metrics".into(), Table::new(&["name", "value"]));
        r.finish();
        let v: Value = serde_json::from_str(&r.canonical_json()).unwrap();
        assert_eq!(v["tables"]["metrics"]["rows"], serde_json::json!([]));
        assert!(!r.pass);
    }

    #[test]
    fn keys_are_sorted_and_runtime_is_excluded() {
        let mut r = Report::new("EXP-TEST", "ab".into(), 3);
        r.metric("zeta", 1.0);
        r.metric("alpha", 2.0);
        r.verdict("ok", true);
        r.runtime = 12.5;
        r.finish();
        let s = r.canonical_json();
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(!s.contains("runtime"));
        assert!(r.pass);
    }

    #[test]
    fn render_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::new("EXP-TEST", "ab".into(), 3);
        let mut t = Table::new(&["name", "value"]);
        t.push(vec![Value::from("a,b"), Value::from(1.5)]);
        r.tables.insert("main".into(), t);
        r.profiles.insert("area".into(), vec![(1.0, 1.0), (0.1, 0.1)]);
        r.verdict("ok", true);
        r.finish();
        let path = r.render(dir.path()).unwrap();
        assert_eq!(Report::load(&path).unwrap(), r);
        for a in &r.artifacts {
            assert!(path.parent().unwrap().join(a).exists(), "{a}");
        }
        let csv = std::fs::read_to_string(dir.path().join("EXP-TEST/main.csv")).unwrap();
        assert_eq!(csv, "name,value\n\"a,b\",1.5\n");
    }

    #[test]
    fn merge_follows_registry_order() {
        let a = Report { id: "EXP-WELD".into(), pass: true, ..Default::default() };
        let b = Report { id: "EXP-Z1".into(), pass: false, ..Default::default() };
        let m = merge(vec![a, b]);
        assert_eq!(m["experiments"][0]["id"], "EXP-Z1");
        assert_eq!(m["pass"], false);
    }
}
