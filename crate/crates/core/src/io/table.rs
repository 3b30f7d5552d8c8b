//! CSV ingestion against a column schema, and CSV emission with full
//! round-trip float precision.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::observables::{CorrelationFunction, Spectrum};

/// Required leading columns, then any prefix of the optional ones.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub required: Vec<String>,
    pub optional: Vec<String>,
}

impl CsvSchema {
    pub fn new(required: &[&str], optional: &[&str]) -> Self {
        CsvSchema {
            required: required.iter().map(|s| s.to_string()).collect(),
            optional: optional.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn accepts(&self, header: &[String]) -> bool {
        let r = self.required.len();
        header.len() >= r
            && header.len() <= r + self.optional.len()
            && header[..r] == self.required[..]
            && header[r..] == self.optional[..header.len() - r]
    }

    fn describe(&self) -> String {
        let mut s = self.required.join(",");
        if !self.optional.is_empty() {
            let _ = write!(s, "[,{}]", self.optional.join(","));
        }
        s
    }
}

/// Typed numeric table, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub path: PathBuf,
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|k| self.data[k].as_slice())
    }
}

/// Reads a headed CSV of numbers. Lines starting with `#` are comments.
/// Errors name the file and the offending line.
pub fn ingest_csv(path: &Path, schema: &CsvSchema) -> Result<Table> {
    let ingest = |reason: String| Error::Ingestion { path: path.to_path_buf(), reason };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| ingest(e.to_string()))?;
    let header: Vec<String> =
        reader.headers().map_err(|e| ingest(e.to_string()))?.iter().map(str::to_string).collect();
    if !schema.accepts(&header) {
        return Err(ingest(format!("header mismatch: expected {}, found {}", schema.describe(), header.join(","))));
    }
    let mut data = vec![Vec::new(); header.len()];
    for record in reader.records() {
        let record = record.map_err(|e| ingest(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(ingest(format!("line {line}: expected {} fields, found {}", header.len(), record.len())));
        }
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| ingest(format!("line {line}: column {:?} is not a number: {field:?}", header[k])))?;
            data[k].push(v);
        }
    }
    Ok(Table { path: path.to_path_buf(), columns: header, data })
}

/// Header line plus one row per index; floats in shortest round-trip form.
pub fn csv_string(headers: &[&str], columns: &[&[f64]]) -> String {
    assert_eq!(headers.len(), columns.len());
    let rows = columns.first().map_or(0, |c| c.len());
    assert!(columns.iter().all(|c| c.len() == rows), "columns differ in length");
    let mut s = headers.join(",");
    s.push('\n');
    for i in 0..rows {
        for (k, c) in columns.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", c[i]);
        }
        s.push('\n');
    }
    s
}

pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    csv_string(&["detuning_mhz", &spectrum.quantity], &[&spectrum.detuning_mhz, &spectrum.values])
}

pub fn spectrum_from_table(table: &Table) -> Result<Spectrum> {
    if table.columns.len() != 2 || table.columns[0] != "detuning_mhz" {
        return Err(Error::Ingestion { path: table.path.clone(), reason: "expected detuning_mhz plus one value column".into() });
    }
    Ok(Spectrum::new(table.data[0].clone(), table.data[1].clone(), table.columns[1].clone()))
}

pub fn correlation_csv(cf: &CorrelationFunction) -> String {
    csv_string(&["tau_ns", "g2", "counts"], &[&cf.taus, &cf.g2, &cf.counts])
}
