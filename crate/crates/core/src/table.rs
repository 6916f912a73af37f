//! Column-labelled numeric tables and their CSV/JSON serialization.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }

    fn header(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

/// Ordered samples with column metadata. `records` carries optional
/// structured per-row data for the JSON form.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CurveTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Value>,
}

#[derive(Serialize, Deserialize)]
struct JsonForm {
    schema_version: u32,
    metadata: BTreeMap<String, Value>,
    columns: Vec<Column>,
    rows: Vec<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    records: Option<Value>,
}

impl CurveTable {
    pub fn new(columns: Vec<Column>) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        Self {
            columns,
            rows: Vec::new(),
            metadata,
            records: None,
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(self.columns.iter().map(Column::header))
            .map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v)))
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let form = JsonForm {
            schema_version: SCHEMA_VERSION,
            metadata: self.metadata.clone(),
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| v.is_finite().then_some(*v)).collect())
                .collect(),
            records: self.records.clone(),
        };
        serde_json::to_writer_pretty(&mut out, &form).map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let columns = r
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(parse_header)
            .collect::<Result<Vec<_>>>()?;
        let mut table = CurveTable::new(columns);
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::Io(format!("bad number `{s}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let form: JsonForm = serde_json::from_reader(input).map_err(|e| Error::Io(e.to_string()))?;
        Ok(Self {
            columns: form.columns,
            rows: form
                .rows
                .into_iter()
                .map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
                .collect(),
            metadata: form.metadata,
            records: form.records,
        })
    }
}

/// 17 significant digits in scientific notation; round-trips every f64.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_header(h: &str) -> Result<Column> {
    let open = h.rfind('[');
    match (open, h.ends_with(']')) {
        (Some(i), true) => Ok(Column::new(&h[..i], &h[i + 1..h.len() - 1])),
        _ => Err(Error::Io(format!("column header `{h}` lacks a [unit]"))),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes the table to `path`, or to standard output when `path` is None.
pub fn emit(table: &CurveTable, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p)?;
            let mut buf = std::io::BufWriter::new(f);
            table.write(format, &mut buf)?;
            buf.flush()?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(format, &mut lock)
        }
    }
}
