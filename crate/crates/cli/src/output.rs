//! Tabular results and their CSV / JSON encodings.
//!
//! CSV: one header row, then one row per record in the column order given
//! by the command. Floats carry 12 significant digits; BER columns are
//! always in scientific notation. JSON: `{"config", "records", "version"}`
//! with one object per record using the CSV column names as keys.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::VERSION;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Str(String),
    Int(i64),
    Float(f64),
    /// A probability, printed in scientific notation.
    Ber(f64),
    Null,
}

impl Field {
    pub fn opt_float(x: Option<f64>) -> Field {
        x.map_or(Field::Null, Field::Float)
    }

    pub fn opt_ber(x: Option<f64>) -> Field {
        x.map_or(Field::Null, Field::Ber)
    }

    pub fn str(s: impl Into<String>) -> Field {
        Field::Str(s.into())
    }

    fn csv(&self) -> String {
        match self {
            Field::Str(s) => s.clone(),
            Field::Int(i) => i.to_string(),
            Field::Float(x) if x.is_finite() => round12(*x).to_string(),
            Field::Ber(x) if x.is_finite() => format!("{x:.11e}"),
            Field::Float(x) | Field::Ber(x) => x.to_string(),
            Field::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Str(s) => Value::String(s.clone()),
            Field::Int(i) => Value::from(*i),
            Field::Float(x) | Field::Ber(x) => Number::from_f64(round12(*x)).map_or(Value::Null, Value::Number),
            Field::Null => Value::Null,
        }
    }
}

fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
    /// Per-cell diagnostics of rows that could not be computed.
    pub failures: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), failures: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Field::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, config: Value) -> Value {
        let records = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, f)| (c.to_string(), f.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("config".into(), config);
        top.insert("records".into(), Value::Array(records));
        top.insert("version".into(), Value::String(VERSION.into()));
        Value::Object(top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(Field::Float(0.5).csv(), "0.5");
        assert_eq!(Field::Float(13.936_472_823_712_346).csv(), "13.9364728237");
        assert_eq!(Field::Ber(1e-10).csv(), "1.00000000000e-10");
        assert_eq!(Field::Ber(0.012345678901234).csv(), "1.23456789012e-2");
        assert_eq!(Field::Null.csv(), "");
        assert_eq!(Field::Float(f64::NEG_INFINITY).json(), Value::Null);
    }

    #[test]
    fn csv_and_json_layout() {
        let mut t = Table::new(vec!["a", "b", "note"]);
        t.push(vec![Field::Int(1), Field::Ber(0.25), Field::str("x, y")]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,note\n1,2.50000000000e-1,\"x, y\"\n");
        let j = t.to_json(Value::Null);
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["config", "records", "version"]);
        assert_eq!(j["records"][0]["b"], 0.25);
    }
}
