//! CSV tables and JSON run summaries.
//!
//! Every table starts with a fixed header whose entries read `name[unit]`,
//! where the unit is `len` for lengths in the phase plane, `time` for flow
//! time, `1` for dimensionless numbers and `-` for labels.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

/// Writes a CSV table with the given header.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Formats a float so that it reads back bit-exactly.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Reads one numeric column of a CSV file with a header, by name or, when
/// no name is given, the last column.
pub fn read_column(path: &Path, name: Option<&str>) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let index = match name {
        Some(n) => headers
            .iter()
            .position(|h| h == n || h.split('[').next() == Some(n))
            .ok_or_else(|| crate::Error::InvalidInput(format!("column {n:?} not found in {}", path.display())))?,
        None => headers.len().saturating_sub(1),
    };
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let cell = rec.get(index).unwrap_or("");
        let v: f64 = cell.trim().parse().map_err(|_| {
            crate::Error::InvalidInput(format!(
                "{}: row {} has non-numeric value {cell:?}",
                path.display(),
                line + 2
            ))
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Collects the inputs, outputs and timing of one command run.
pub struct RunSummary {
    command: String,
    inputs: Value,
    outputs: Vec<PathBuf>,
    results: serde_json::Map<String, Value>,
    started: Instant,
}

impl RunSummary {
    pub fn new(command: &str, inputs: &impl Serialize) -> Self {
        RunSummary {
            command: command.to_string(),
            inputs: serde_json::to_value(inputs).unwrap_or(Value::Null),
            outputs: Vec::new(),
            results: serde_json::Map::new(),
            started: Instant::now(),
        }
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": self.inputs,
            "outputs": self.outputs,
            "results": self.results,
            "timings": { "wallSeconds": self.started.elapsed().as_secs_f64() },
        })
    }

    /// Writes `<dir>/<command>_summary.json` and returns its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}_summary.json", self.command));
        fs::write(&path, serde_json::to_string_pretty(&self.to_json())?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv(&p, &["n[1]", "s[len]"], (0..5).map(|i| vec![i.to_string(), num(0.1 * i as f64)])).unwrap();
        let s = read_column(&p, Some("s")).unwrap();
        assert_eq!(s[3], 0.1 * 3.0);
        assert_eq!(read_column(&p, None).unwrap(), s);
        assert!(read_column(&p, Some("q")).is_err());
    }

    #[test]
    fn summary_echoes_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = RunSummary::new("demo", &json!({"tol": 1e-10}));
        r.result("value", 0.16);
        let p = r.write(dir.path()).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(v["inputs"]["tol"], 1e-10);
        assert_eq!(v["results"]["value"], 0.16);
    }
}
