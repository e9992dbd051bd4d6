//! Tabular command output with lossless CSV and JSON renderings.
//!
//! Exact values are rationals (`{"num": "...", "den": "..."}` in JSON,
//! `p/q` in CSV); reals use the shortest decimal that round-trips the
//! `f64`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_core::ExactRational;

/// Bumped on any column change.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Exact,
    Real,
    Text,
    Bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Exact(ExactRational),
    Bool(bool),
    /// Reals and text; the column kind tells them apart.
    Text(String),
}

impl Cell {
    pub fn real(x: f64) -> Cell {
        Cell::Text(format_real(x))
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn int(v: impl Into<num_bigint::BigInt>) -> Cell {
        Cell::Exact(ExactRational::from_integer(v))
    }

    pub fn as_exact(&self) -> Option<&ExactRational> {
        match self {
            Cell::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Cell::Text(s) => s.parse().ok(),
            Cell::Exact(r) => Some(r.to_f64()),
            Cell::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Cell::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn to_csv_field(&self) -> String {
        match self {
            Cell::Exact(r) => r.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn from_csv_field(kind: ColumnKind, field: &str) -> Result<Cell> {
        match kind {
            ColumnKind::Exact => field.parse().map(Cell::Exact),
            ColumnKind::Bool => match field {
                "true" => Ok(Cell::Bool(true)),
                "false" => Ok(Cell::Bool(false)),
                _ => Err(Error::Parse(format!("'{field}' is not a boolean"))),
            },
            ColumnKind::Real | ColumnKind::Text => Ok(Cell::Text(field.to_string())),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Only filled on request so that output stays byte-reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl OutputRecord {
    pub fn new(command: impl Into<String>, columns: &[(&str, ColumnKind)]) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            params: BTreeMap::new(),
            columns: columns
                .iter()
                .map(|(n, k)| Column {
                    name: (*n).into(),
                    kind: *k,
                })
                .collect(),
            rows: Vec::new(),
            seed: None,
            timing_ms: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::contract(format!(
                "row has {} cells, {} columns declared",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Cells of the named column, top to bottom.
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)
                    .map_err(|e| Error::Serialization(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
                let ser = |e: csv::Error| Error::Serialization(e.to_string());
                w.write_record(&header).map_err(ser)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_csv_field)).map_err(ser)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Parses CSV produced by [`render`](Self::render) back into rows, using
    /// this record's column declarations.
    pub fn rows_from_csv(columns: &[Column], text: &str) -> Result<Vec<Vec<Cell>>> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        let names: Vec<&str> = columns.iter().map(|c| c.name.as_str()).collect();
        if header.iter().collect::<Vec<_>>() != names {
            return Err(Error::Parse("CSV header does not match the declared columns".into()));
        }
        r.records()
            .map(|rec| {
                let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
                rec.iter()
                    .zip(columns)
                    .map(|(f, c)| Cell::from_csv_field(c.kind, f))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> OutputRecord {
        let mut r = OutputRecord::new(
            "demo",
            &[
                ("n", ColumnKind::Exact),
                ("value", ColumnKind::Exact),
                ("ratio", ColumnKind::Real),
                ("ok", ColumnKind::Bool),
                ("witness", ColumnKind::Text),
            ],
        );
        r.param("n_max", 2);
        r.push(vec![
            Cell::int(1),
            Cell::Exact(ExactRational::from_ratio(-7, 60)),
            Cell::real(f64::NAN),
            Cell::Bool(true),
            Cell::text("+"),
        ])
        .unwrap();
        r.push(vec![
            Cell::int(2),
            Cell::Exact(ExactRational::from_ratio(1, 2)),
            Cell::real(-1.0),
            Cell::Bool(false),
            Cell::text("+-"),
        ])
        .unwrap();
        r
    }

    #[test]
    fn csv_layout() {
        let s = sample().render(Format::Csv).unwrap();
        assert_eq!(s, "n,value,ratio,ok,witness\n1,-7/60,NaN,true,+\n2,1/2,-1.0,false,+-\n");
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let s = r.render(Format::Json).unwrap();
        assert!(s.contains("\"num\": \"-7\""));
        assert!(!s.contains("timing_ms"));
        assert_eq!(OutputRecord::from_json(&s).unwrap(), r);
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let rows = OutputRecord::rows_from_csv(&r.columns, &r.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(rows, r.rows);
    }

    #[test]
    fn row_width_is_checked() {
        let mut r = sample();
        assert!(r.push(vec![Cell::int(1)]).is_err());
    }

    proptest! {
        #[test]
        fn reals_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            prop_assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }

        #[test]
        fn records_round_trip(rows in prop::collection::vec((any::<i64>(), 1i64..1_000_000, any::<f64>(), any::<bool>(), "[+-]{0,12}"), 0..20)) {
            let mut r = OutputRecord::new("p", &[("q", ColumnKind::Exact), ("x", ColumnKind::Real), ("b", ColumnKind::Bool), ("s", ColumnKind::Text)]);
            for (p, q, x, b, s) in rows {
                r.push(vec![Cell::Exact(ExactRational::from_ratio(p, q)), Cell::real(x), Cell::Bool(b), Cell::text(s)]).unwrap();
            }
            let json = r.render(Format::Json).unwrap();
            prop_assert_eq!(&OutputRecord::from_json(&json).unwrap(), &r);
            let csv = r.render(Format::Csv).unwrap();
            prop_assert_eq!(OutputRecord::rows_from_csv(&r.columns, &csv).unwrap(), r.rows.clone());
        }
    }
}
