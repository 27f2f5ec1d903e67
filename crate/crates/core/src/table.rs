//! Column tables with metadata, serialized as CSV or JSON.
//!
//! CSV layout: `# key=value` lines, one header row, then rows of numbers
//! written with 17 significant digits. JSON layout:
//! `{"meta": {...}, "data": {"columns": [...], "rows": [[...], ...]}}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(crate::error::invalid("format", format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableData {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    meta: BTreeMap<String, String>,
    data: TableData,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            meta: BTreeMap::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.insert(key.into(), value.to_string());
        self
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.insert(key.into(), value.to_string());
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                what: "table row",
                expected: self.columns.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Builds a table from equal-length columns.
    pub fn from_columns(columns: &[(&str, &[f64])]) -> Result<Self> {
        let len = columns.first().map_or(0, |c| c.1.len());
        let mut table = Table::new(columns.iter().map(|c| c.0));
        for (name, values) in columns {
            if values.len() != len {
                return Err(Error::Format(format!(
                    "column `{name}` has {} values, expected {len}",
                    values.len()
                )));
            }
        }
        table.rows = (0..len).map(|i| columns.iter().map(|c| c.1[i]).collect()).collect();
        Ok(table)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }

    pub fn parse(text: &str, format: Format) -> Result<Self> {
        match format {
            Format::Csv => Self::from_csv(text),
            Format::Json => Self::from_json(text),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut table = Table::default();
        let mut header = false;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .trim_start()
                    .split_once('=')
                    .ok_or_else(|| Error::Format(format!("line {}: metadata without `=`", lineno + 1)))?;
                table.meta.insert(k.to_string(), v.to_string());
                continue;
            }
            if !header {
                table.columns = line.split(',').map(|c| c.trim().to_string()).collect();
                header = true;
                continue;
            }
            let row = line
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Format(format!("line {}: {e}: `{c}`", lineno + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != table.columns.len() {
                return Err(Error::Format(format!(
                    "line {}: {} cells, header has {}",
                    lineno + 1,
                    row.len(),
                    table.columns.len()
                )));
            }
            table.rows.push(row);
        }
        if !header {
            return Err(Error::Format("missing header row".into()));
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = JsonTable {
            meta: self.meta.clone(),
            data: TableData {
                columns: self.columns.clone(),
                rows: self.rows.clone(),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonTable = serde_json::from_str(text)?;
        if doc.data.rows.iter().any(|r| r.len() != doc.data.columns.len()) {
            return Err(Error::Format("row length differs from column count".into()));
        }
        Ok(Self {
            meta: doc.meta,
            columns: doc.data.columns,
            rows: doc.data.rows,
        })
    }
}

/// Reads a real-valued record: one number per line, or the named column of
/// a CSV table. Blank lines and `#` comments are skipped.
pub fn read_record(text: &str, column: Option<&str>) -> Result<Vec<f64>> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    let has_header = first.is_some_and(|l| l.split(',').any(|c| c.trim().parse::<f64>().is_err()));
    if has_header || column.is_some() {
        let table = Table::from_csv(text)?;
        let name = match column {
            Some(c) => c.to_string(),
            None if table.columns.len() == 1 => table.columns[0].clone(),
            None => {
                return Err(Error::Format(format!(
                    "table has {} columns; name one",
                    table.columns.len()
                )))
            }
        };
        return table
            .column(&name)
            .ok_or_else(|| Error::Format(format!("no column `{name}`")));
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| Error::Format(format!("{e}: `{l}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Table {
        let mut t = Table::new(["xi", "value"]).with_meta("n", 16).with_meta("w", 0.125);
        t.push_row(vec![-0.5, 1.0 / 3.0]).unwrap();
        t.push_row(vec![0.0, 1e-300]).unwrap();
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# n=16");
        assert_eq!(lines[1], "# w=0.125");
        assert_eq!(lines[2], "xi,value");
        assert_eq!(lines[3], "-5.0000000000000000e-1,3.3333333333333331e-1");
    }

    #[test]
    fn json_layout() {
        let v: serde_json::Value = serde_json::from_str(&sample().to_json().unwrap()).unwrap();
        assert_eq!(v["meta"]["n"], "16");
        assert_eq!(v["data"]["columns"][1], "value");
        assert_eq!(v["data"]["rows"][0][0], -0.5);
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut t = Table::new(["a"]);
        assert!(t.push_row(vec![1.0, 2.0]).is_err());
        assert!(Table::from_csv("a,b\n1,2\n3\n").is_err());
        assert!(Table::from_csv("# only=meta\n").is_err());
        assert!(Table::from_columns(&[("a", &[1.0]), ("b", &[1.0, 2.0])]).is_err());
    }

    #[test]
    fn record_reading() {
        assert_eq!(read_record("1\n# c\n\n2.5\n", None).unwrap(), vec![1.0, 2.5]);
        assert_eq!(read_record("# n=2\nx\n1\n2\n", None).unwrap(), vec![1.0, 2.0]);
        assert_eq!(read_record("t,x\n0,4\n1,5\n", Some("x")).unwrap(), vec![4.0, 5.0]);
        assert!(read_record("t,x\n0,4\n", None).is_err());
        assert!(read_record("1\nfoo\n", None).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(rows in prop::collection::vec(prop::collection::vec(-1e300f64..1e300, 3), 0..20),
                      key in "[a-z_]{1,8}", value in "[a-zA-Z0-9.:,-]{0,12}") {
            let mut t = Table::new(["a", "b", "c"]).with_meta(key, value);
            for r in rows { t.push_row(r).unwrap(); }
            prop_assert_eq!(&Table::from_csv(&t.to_csv()).unwrap(), &t);
            prop_assert_eq!(&Table::from_json(&t.to_json().unwrap()).unwrap(), &t);
        }
    }
}
