use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    Stuck,
}

/// One verified statement with the anchor it traces to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub status: CheckStatus,
    pub metrics: BTreeMap<String, Value>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, status: CheckStatus) -> Self {
        Self { name: name.into(), anchor: anchor.into(), status, metrics: BTreeMap::new() }
    }

    pub fn pass_if(name: impl Into<String>, anchor: impl Into<String>, ok: bool) -> Self {
        Self::new(name, anchor, if ok { CheckStatus::Pass } else { CheckStatus::Fail })
    }

    pub fn metric(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metrics.insert(key.to_string(), value.into());
        self
    }

    /// Record for a check that could not run: a budget overrun is STUCK,
    /// anything else FAIL.
    pub fn from_error(name: impl Into<String>, anchor: impl Into<String>, e: &Error) -> Self {
        let status = if matches!(e, Error::BudgetExceeded(_)) { CheckStatus::Stuck } else { CheckStatus::Fail };
        Self::new(name, anchor, status).metric("error", e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool: String,
    pub tool_version: String,
    pub timestamp: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    pub status: CheckStatus,
    /// Name of the first check that did not pass.
    pub first_failure: Option<String>,
}

impl VerificationReport {
    pub fn new(command: &str, config: BTreeMap<String, String>, checks: Vec<CheckRecord>) -> Self {
        let first = checks.iter().find(|c| c.status != CheckStatus::Pass);
        let status = match first {
            None => CheckStatus::Pass,
            Some(_) if checks.iter().any(|c| c.status == CheckStatus::Fail) => CheckStatus::Fail,
            Some(_) => CheckStatus::Stuck,
        };
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string(),
            command: command.to_string(),
            config,
            first_failure: first.map(|c| c.name.clone()),
            checks,
            status,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Concatenates the checks of several reports. The config echo keeps
    /// each source's entries under `<index>.<command>.<key>`.
    pub fn merge(reports: &[VerificationReport]) -> Self {
        let mut config = BTreeMap::new();
        let mut checks = Vec::new();
        for (i, r) in reports.iter().enumerate() {
            for (k, v) in &r.config {
                config.insert(format!("{i}.{}.{k}", r.command), v.clone());
            }
            checks.extend(r.checks.iter().cloned());
        }
        Self::new("report-merge", config, checks)
    }
}

/// One line of the reconstruction table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub solution: String,
    pub point: usize,
    pub region: String,
    /// Coordinates joined by `;`.
    pub coords: String,
    pub component: usize,
    pub reconstructed: f64,
    pub reference: f64,
    pub abs_err: f64,
}

pub fn write_table(path: &Path, rows: &[TableRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(path: &Path) -> Result<Vec<TableRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    r.deserialize().map(|row| row.map_err(|e| Error::Format(e.to_string()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerificationReport {
        let checks = vec![
            CheckRecord::pass_if("a", "eq.deRham.0", true).metric("forms", 100),
            CheckRecord::from_error("b", "Lemma l.3", &Error::BudgetExceeded(10)),
        ];
        VerificationReport::new("verify-algebra", BTreeMap::from([("n".into(), "4".into())]), checks)
    }

    #[test]
    fn overall_status_and_first_failure() {
        let r = sample();
        assert_eq!(r.status, CheckStatus::Stuck);
        assert_eq!(r.first_failure.as_deref(), Some("b"));
        let mut checks = r.checks.clone();
        checks.push(CheckRecord::pass_if("c", "x", false));
        assert_eq!(VerificationReport::new("x", BTreeMap::new(), checks).status, CheckStatus::Fail);
        assert!(VerificationReport::new("x", BTreeMap::new(), vec![]).passed());
    }

    #[test]
    fn json_round_trip_and_spelling() {
        let r = sample();
        let text = r.to_json().unwrap();
        assert_eq!(VerificationReport::from_json(&text).unwrap(), r);
        assert!(text.contains("\"STUCK\"") && text.contains("\"PASS\""));
        assert!(text.contains("\"tool_version\""));
    }

    #[test]
    fn merge_keeps_all_checks() {
        let m = VerificationReport::merge(&[sample(), sample()]);
        assert_eq!(m.checks.len(), 4);
        assert_eq!(m.config["1.verify-algebra.n"], "4");
        assert_eq!(m.status, CheckStatus::Stuck);
    }

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let rows = vec![TableRow {
            solution: "constant_pressure".into(),
            point: 0,
            region: "interior".into(),
            coords: "0.1;0.2".into(),
            component: 2,
            reconstructed: 0.9999999,
            reference: 1.0,
            abs_err: 1e-7,
        }];
        write_table(&path, &rows).unwrap();
        assert_eq!(read_table(&path).unwrap(), rows);
        let header = std::fs::read_to_string(&path).unwrap();
        assert!(header.starts_with("solution,point,region,coords,component,reconstructed,reference,abs_err"));
    }
}
