use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use crate::Result;

/// One CSV row: `scenario, epsilon, quantity, value, arg1, arg2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub epsilon: f64,
    pub quantity: String,
    pub value: f64,
    pub arg1: Option<f64>,
    pub arg2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsReport {
    pub rows: Vec<ReportRow>,
}

pub const REPORT_HEADER: [&str; 6] = ["scenario", "epsilon", "quantity", "value", "arg1", "arg2"];

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl DiagnosticsReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, scenario: &str, epsilon: f64, quantity: &str, value: f64, arg1: Option<f64>, arg2: Option<f64>) {
        self.rows.push(ReportRow { scenario: scenario.into(), epsilon, quantity: quantity.into(), value, arg1, arg2 });
    }

    pub fn extend(&mut self, other: DiagnosticsReport) {
        self.rows.extend(other.rows);
    }

    /// First value recorded under `quantity`.
    pub fn get(&self, quantity: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.quantity == quantity).map(|r| r.value)
    }

    pub fn values(&self, quantity: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.quantity == quantity).map(|r| r.value).collect()
    }

    pub fn to_csv_string(&self, header: bool) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if header {
            w.write_record(REPORT_HEADER)?;
        }
        for r in &self.rows {
            w.write_record([
                r.scenario.clone(),
                r.epsilon.to_string(),
                r.quantity.clone(),
                r.value.to_string(),
                cell(r.arg1),
                cell(r.arg2),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
    }

    /// Appends rows, writing the header first when the file is new or empty.
    pub fn append_csv(&self, path: &Path) -> Result<()> {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(self.to_csv_string(fresh)?.as_bytes())?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string(true)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_writes_header_once() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let mut r = DiagnosticsReport::new();
        r.push("flat", 0.05, "entropy", 0.9428, Some(0.1), None);
        r.append_csv(&p).unwrap();
        r.append_csv(&p).unwrap();
        let s = std::fs::read_to_string(&p).unwrap();
        assert_eq!(s, "scenario,epsilon,quantity,value,arg1,arg2\nflat,0.05,entropy,0.9428,0.1,\nflat,0.05,entropy,0.9428,0.1,\n");
        assert_eq!(r.get("entropy"), Some(0.9428));
    }
}
