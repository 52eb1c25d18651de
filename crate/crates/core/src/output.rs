//! CSV and JSON records of experiment tables.
//!
//! CSV: first line `# config: <json>`, an optional `# generated_at:` comment,
//! a header row, data rows with reals in scientific notation to 12
//! significant digits, and a trailing `# fit:` comment. Only comment lines may
//! vary between runs of the same config.
//!
//! JSON: `{config, rows[], fit}` where `fit` is `{slope, intercept,
//! max_residual}` or `{"status": "floor"}`.

use std::fmt::Write as _;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::config::{ExperimentConfig, OutputFormat};
use crate::fit::PowerLawFit;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Real(v) => s.serialize_f64(*v),
            Cell::Text(v) => s.serialize_str(v),
        }
    }
}

/// `{:.11e}`: twelve significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitStatus {
    Fitted(PowerLawFit),
    /// A fit was requested but too few values rose above the numerical floor.
    Floor,
    NotApplicable,
}

impl From<Option<PowerLawFit>> for FitStatus {
    fn from(fit: Option<PowerLawFit>) -> Self {
        fit.map_or(FitStatus::Floor, FitStatus::Fitted)
    }
}

impl Serialize for FitStatus {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            FitStatus::Fitted(f) => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("slope", &f.slope)?;
                m.serialize_entry("intercept", &f.intercept)?;
                m.serialize_entry("max_residual", &f.max_residual)?;
                m.end()
            }
            FitStatus::Floor => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("status", "floor")?;
                m.end()
            }
            FitStatus::NotApplicable => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub fit: FitStatus,
}

struct RowObject<'a> {
    columns: &'a [String],
    cells: &'a [Cell],
}

impl Serialize for RowObject<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.columns.len()))?;
        for (c, v) in self.columns.iter().zip(self.cells) {
            m.serialize_entry(c, v)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct Document<'a> {
    config: &'a ExperimentConfig,
    rows: Vec<RowObject<'a>>,
    #[serde(skip_serializing_if = "is_not_applicable")]
    fit: FitStatus,
}

fn is_not_applicable(f: &FitStatus) -> bool {
    *f == FitStatus::NotApplicable
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fit: FitStatus::NotApplicable,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match the header"
        );
        self.rows.push(row);
    }

    pub fn with_fit(mut self, fit: FitStatus) -> Self {
        self.fit = fit;
        self
    }

    pub fn to_csv(&self, config: &ExperimentConfig, generated_at: Option<u64>) -> String {
        let mut out = String::new();
        writeln!(out, "# config: {}", config.to_json()).unwrap();
        if let Some(t) = generated_at {
            writeln!(out, "# generated_at: {t}").unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            writeln!(
                out,
                "{}",
                row.iter().map(Cell::csv).collect::<Vec<_>>().join(",")
            )
            .unwrap();
        }
        match self.fit {
            FitStatus::Fitted(f) => writeln!(
                out,
                "# fit: slope={} intercept={} max_residual={} points={}",
                format_real(f.slope),
                format_real(f.intercept),
                format_real(f.max_residual),
                f.points
            )
            .unwrap(),
            FitStatus::Floor => writeln!(out, "# fit: floor").unwrap(),
            FitStatus::NotApplicable => {}
        }
        out
    }

    pub fn to_json(&self, config: &ExperimentConfig) -> String {
        let doc = Document {
            config,
            rows: self
                .rows
                .iter()
                .map(|cells| RowObject {
                    columns: &self.columns,
                    cells,
                })
                .collect(),
            fit: self.fit,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, config: &ExperimentConfig, generated_at: Option<u64>) -> String {
        match config.format {
            OutputFormat::Csv => self.to_csv(config, generated_at),
            OutputFormat::Json => self.to_json(config),
        }
    }
}

/// Lines of a CSV document that carry data: everything except `#` comments.
pub fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new(&["epsilon", "k", "note"]);
        t.push(vec![
            Cell::Real(1e-3),
            Cell::Int(4),
            Cell::Text("a,b".into()),
        ]);
        t.push(vec![
            Cell::Real(0.123456789012345),
            Cell::Int(8),
            Cell::Text("plain".into()),
        ]);
        t
    }

    #[test]
    fn reals_have_twelve_significant_digits() {
        assert_eq!(format_real(1e-3), "1.00000000000e-3");
        assert_eq!(format_real(0.123456789012345), "1.23456789012e-1");
        assert_eq!(format_real(0.0), "0.00000000000e0");
    }

    #[test]
    fn csv_layout() {
        let cfg = ExperimentConfig::default();
        let fit = PowerLawFit {
            slope: 2.0,
            intercept: -1.0,
            max_residual: 0.01,
            points: 2,
        };
        let csv = table()
            .with_fit(FitStatus::Fitted(fit))
            .to_csv(&cfg, Some(42));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], format!("# config: {}", cfg.to_json()));
        assert_eq!(lines[1], "# generated_at: 42");
        assert_eq!(lines[2], "epsilon,k,note");
        assert_eq!(lines[3], "1.00000000000e-3,4,\"a,b\"");
        assert!(lines[5].starts_with("# fit: slope=2.00000000000e0"));
        assert_eq!(data_lines(&csv).len(), 3);
        assert_eq!(data_lines(&csv), data_lines(&table().to_csv(&cfg, Some(7))));
    }

    #[test]
    fn json_layout() {
        let cfg = ExperimentConfig::default();
        let v: serde_json::Value =
            serde_json::from_str(&table().with_fit(FitStatus::Floor).to_json(&cfg)).unwrap();
        assert_eq!(v["fit"]["status"], "floor");
        assert_eq!(v["rows"][1]["k"], 8);
        assert_eq!(v["config"]["seed"], 7);
        let v: serde_json::Value = serde_json::from_str(&table().to_json(&cfg)).unwrap();
        assert!(v.get("fit").is_none());
    }
}
