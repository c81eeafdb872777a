//! Data files: CSV with a `#` metadata header, or a single JSON object.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

use super::config::OutputFormat;

pub const LIBRARY: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// One table plus the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub name: String,
    /// Ordered `key → JSON value` pairs written to the header.
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DataFile {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            metadata: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: Value) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    /// Builds rows from equal-length columns.
    pub fn with_columns(mut self, data: &[&[f64]]) -> Self {
        let n = data.first().map_or(0, |c| c.len());
        debug_assert!(data.iter().all(|c| c.len() == n));
        self.rows = (0..n).map(|i| data.iter().map(|c| c[i]).collect()).collect();
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    fn full_metadata(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("library".into(), json!(LIBRARY));
        m.insert("curve".into(), json!(self.name));
        for (k, v) in &self.metadata {
            m.insert(k.clone(), v.clone());
        }
        m
    }

    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<PathBuf> {
        let path = dir.join(format!("{}.{}", self.name, format.extension()));
        let mut file = fs::File::create(&path)?;
        match format {
            OutputFormat::Csv => self.write_csv(&mut file)?,
            OutputFormat::Json => {
                let mut body = Map::new();
                body.insert("metadata".into(), Value::Object(self.full_metadata()));
                body.insert("columns".into(), json!(self.columns));
                body.insert("rows".into(), json!(self.rows));
                serde_json::to_writer_pretty(&mut file, &Value::Object(body))?;
                file.write_all(b"\n")?;
            }
        }
        Ok(path)
    }

    fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        for (k, v) in self.full_metadata() {
            let text = match v {
                Value::String(s) => s,
                other => serde_json::to_string(&other)?,
            };
            writeln!(out, "# {k}: {text}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            writer
                .write_record(row.iter().map(|v| format_real(*v)))
                .map_err(csv_err)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            let body: Value = serde_json::from_str(&text)?;
            let bad = |what: &str| Error::Config {
                key: path.display().to_string(),
                reason: format!("missing or malformed `{what}`"),
            };
            let mut metadata = body["metadata"].as_object().cloned().ok_or_else(|| bad("metadata"))?;
            let name = metadata
                .remove("curve")
                .and_then(|v| v.as_str().map(String::from))
                .ok_or_else(|| bad("curve"))?;
            metadata.remove("library");
            let columns = serde_json::from_value(body["columns"].clone()).map_err(|_| bad("columns"))?;
            let rows = serde_json::from_value(body["rows"].clone()).map_err(|_| bad("rows"))?;
            return Ok(Self {
                name,
                metadata,
                columns,
                rows,
            });
        }

        let mut metadata = Map::new();
        let mut name = String::new();
        for line in BufReader::new(text.as_bytes()).lines() {
            let line = line?;
            let Some(rest) = line.strip_prefix("# ") else { break };
            let Some((k, v)) = rest.split_once(": ") else { continue };
            match k {
                "library" => {}
                "curve" => name = v.to_string(),
                _ => {
                    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
                    metadata.insert(k.to_string(), value);
                }
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns = reader.headers().map_err(csv_err)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            let row = record
                .iter()
                .map(|s| {
                    s.parse::<f64>().map_err(|_| Error::Config {
                        key: path.display().to_string(),
                        reason: format!("`{s}` is not a number"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Self {
            name,
            metadata,
            columns,
            rows,
        })
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Tracks written files so a failed run can remove its partial output.
#[derive(Debug, Default)]
pub struct OutputSet {
    pub written: Vec<PathBuf>,
}

impl OutputSet {
    pub fn write(&mut self, file: &DataFile, dir: &Path, format: OutputFormat) -> Result<PathBuf> {
        let path = dir.join(format!("{}.{}", file.name, format.extension()));
        // record before writing so a half-written file is also removed
        self.written.push(path);
        file.write(dir, format)
    }

    pub fn remove_all(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_bit_exactly() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.030769230769230771] {
            assert_eq!(format_real(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn csv_and_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = DataFile::new("t", &["x", "y"])
            .meta("config", json!({"a": 1, "b": [1.5, 2.0]}))
            .with_columns(&[&[0.1, 0.2], &[1.0 / 3.0, -7.0]]);
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let path = f.write(dir.path(), format).unwrap();
            let back = DataFile::read(&path).unwrap();
            assert_eq!(back, f);
        }
    }
}
