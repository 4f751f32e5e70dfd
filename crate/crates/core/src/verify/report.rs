//! Estimate reports: one record per checked inequality, emitted as JSON and CSV.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::write_atomic;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// the inequality or identity being certified
    pub inequality: String,
    pub constants: BTreeMap<String, f64>,
    pub exponents: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// true when the record depends on random paths
    pub stochastic: bool,
    pub notes: Vec<String>,
    /// named (x, y) series for plotting
    pub series: BTreeMap<String, Vec<[f64; 2]>>,
}

impl CheckRecord {
    pub fn new(name: &str, inequality: &str, tolerance: f64) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            inequality: inequality.to_string(),
            constants: BTreeMap::new(),
            exponents: BTreeMap::new(),
            tolerance,
            pass: true,
            stochastic: false,
            notes: Vec::new(),
            series: BTreeMap::new(),
        }
    }

    pub fn constant(mut self, key: &str, v: f64) -> Self {
        self.constants.insert(key.to_string(), v);
        self
    }

    pub fn exponent(mut self, key: &str, v: f64) -> Self {
        self.exponents.insert(key.to_string(), v);
        self
    }

    pub fn require(mut self, ok: bool, why: impl Into<String>) -> Self {
        if !ok {
            self.pass = false;
            self.notes.push(why.into());
        }
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn series(mut self, key: &str, pts: Vec<[f64; 2]>) -> Self {
        self.series.insert(key.to_string(), pts);
        self
    }

    pub fn stochastic(mut self) -> Self {
        self.stochastic = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub lattice: String,
    pub model_hash: String,
    pub config_hash: String,
    pub seed: u64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub environment: Environment,
    pub records: Vec<CheckRecord>,
}

impl EstimateReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Input(e.to_string()))
    }

    /// One row per (record, constant or exponent).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,kind,key,value,pass\n");
        for r in &self.records {
            for (k, v) in &r.constants {
                s.push_str(&format!("{},constant,{k},{v:e},{}\n", r.name, r.pass));
            }
            for (k, v) in &r.exponents {
                s.push_str(&format!("{},exponent,{k},{v:e},{}\n", r.name, r.pass));
            }
            if r.constants.is_empty() && r.exponents.is_empty() {
                s.push_str(&format!("{},status,,,{}\n", r.name, r.pass));
            }
        }
        s
    }

    /// report.json, report.csv and one whitespace-separated data file per series.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join("report.json"), self.to_json()?.as_bytes())?;
        write_atomic(&dir.join("report.csv"), self.to_csv().as_bytes())?;
        for r in &self.records {
            for (k, pts) in &r.series {
                let mut s = format!("# {} {}\n", r.name, k);
                for p in pts {
                    s.push_str(&format!("{:e} {:e}\n", p[0], p[1]));
                }
                write_atomic(&dir.join(format!("{}_{}.dat", r.name, k)), s.as_bytes())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_and_csv() {
        let r = CheckRecord::new("demo", "a ≤ C b", 0.1).constant("C", 2.0).exponent("p", 1.0).require(false, "too big");
        assert!(!r.pass && r.notes == ["too big"]);
        let rep = EstimateReport {
            environment: Environment { lattice: "d=1".into(), model_hash: "x".into(), config_hash: "y".into(), seed: 1, notes: vec![] },
            records: vec![r.series("s", vec![[1.0, 2.0]])],
        };
        assert!(!rep.all_pass());
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 3);
        let dir = tempfile::tempdir().unwrap();
        rep.save(dir.path()).unwrap();
        assert!(dir.path().join("demo_s.dat").exists());
        let json: serde_json::Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
        assert_eq!(json["records"][0]["constants"]["C"], 2.0);
    }
}
