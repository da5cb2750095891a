//! Tabular results and their CSV/JSON files.
//!
//! Floats are written with 17 significant digits in CSV and in shortest
//! round-trip form in JSON, so both reload bit-exactly. The wall-clock
//! timestamp appears only in the provenance block and in the file name.

use super::ExperimentError;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    pub fn csv(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::F(x) => Some(*x),
            Cell::I(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::S(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            // non-finite values become null
            Cell::F(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::F(_) => s.serialize_none(),
            Cell::I(i) => s.serialize_i64(*i),
            Cell::B(b) => s.serialize_bool(*b),
            Cell::S(v) => s.serialize_str(v),
        }
    }
}

/// Named columns and rows of equal width.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, ExperimentError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let ser = |e: csv::Error| ExperimentError::Serialize(e.to_string());
        w.write_record(&self.columns).map_err(ser)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(ser)?;
        }
        w.into_inner().map_err(|e| ExperimentError::Serialize(e.to_string()))
    }
}

struct Records<'a>(&'a Table);
struct Record<'a>(&'a [String], &'a [Cell]);

impl Serialize for Records<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for row in &self.0.rows {
            seq.serialize_element(&Record(&self.0.columns, row))?;
        }
        seq.end()
    }
}

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

/// The echoed run specification: subcommand plus resolved configuration.
pub fn spec_echo(subcommand: &str, config: &impl Serialize) -> Result<serde_json::Value, ExperimentError> {
    let config = serde_json::to_value(config).map_err(|e| ExperimentError::Serialize(e.to_string()))?;
    Ok(json!({ "subcommand": subcommand, "config": config }))
}

/// First 8 hex digits of the SHA-256 of the compact spec JSON. Object
/// keys serialize sorted, so equal specs hash equally.
pub fn short_hash(spec: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(spec).expect("JSON values always serialize");
    hex::encode(Sha256::digest(&bytes))[..8].to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

fn json_bytes(spec: &serde_json::Value, table: &Table, timestamp: &str, seed: u64) -> Result<Vec<u8>, ExperimentError> {
    #[derive(Serialize)]
    struct Doc<'a> {
        spec: &'a serde_json::Value,
        records: Records<'a>,
        provenance: serde_json::Value,
    }
    let doc = Doc {
        spec,
        records: Records(table),
        provenance: json!({
            "artifact": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": timestamp,
            "seed": seed,
            "config": spec.get("config").cloned().unwrap_or(serde_json::Value::Null),
        }),
    };
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| ExperimentError::Serialize(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `<subcommand>-<timestamp>-<hash>.{csv,json}` into `dir`,
/// creating it if needed.
pub fn write_outputs(
    dir: &Path,
    subcommand: &str,
    spec: &serde_json::Value,
    table: &Table,
    seed: u64,
) -> Result<OutputPaths, ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let now = chrono::Utc::now();
    let stamp = now.format("%Y%m%dT%H%M%S%3fZ").to_string();
    let base = format!("{subcommand}-{stamp}-{}", short_hash(spec));
    let paths = OutputPaths {
        csv: dir.join(format!("{base}.csv")),
        json: dir.join(format!("{base}.json")),
    };
    let csv = table.to_csv()?;
    std::fs::write(&paths.csv, csv).map_err(|e| ExperimentError::io(&paths.csv, e))?;
    let json = json_bytes(spec, table, &now.to_rfc3339_opts(chrono::SecondsFormat::Millis, true), seed)?;
    std::fs::write(&paths.json, json).map_err(|e| ExperimentError::io(&paths.json, e))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["x", "label", "n", "ok"]);
        t.push(vec![0.1.into(), "a,b".into(), 3usize.into(), true.into()]);
        t.push(vec![(1.0f64 / 3.0).into(), "plain".into(), 0usize.into(), false.into()]);
        t.push(vec![f64::NAN.into(), "nan".into(), 1usize.into(), true.into()]);
        t
    }

    #[test]
    fn csv_uses_lf_and_seventeen_digits() {
        let text = String::from_utf8(sample().to_csv().unwrap()).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,label,n,ok");
        assert_eq!(lines[1], "1.0000000000000001e-1,\"a,b\",3,true");
        let third: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(third.to_bits(), (1.0f64 / 3.0).to_bits());
    }

    #[test]
    fn empty_table_gives_header_only() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv().unwrap(), b"a,b\n");
        let dir = tempfile::tempdir().unwrap();
        let spec = spec_echo("x", &json!({"k": 1})).unwrap();
        let p = write_outputs(dir.path(), "x", &spec, &t, 0).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&p.json).unwrap()).unwrap();
        assert_eq!(v["records"], json!([]));
        assert!(v.get("spec").is_some() && v.get("provenance").is_some());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let vals = [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, 123456789.123456789, -2.5e-17];
        let mut t = Table::new(&["x"]);
        for v in vals {
            t.push(vec![v.into()]);
        }
        let spec = spec_echo("t", &json!({})).unwrap();
        let bytes = json_bytes(&spec, &t, "now", 1).unwrap();
        let back: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        for (i, v) in vals.iter().enumerate() {
            assert_eq!(back["records"][i]["x"].as_f64().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn file_names_carry_a_stable_hash() {
        let a = spec_echo("scan", &json!({"mu": 0.001, "a": 0.3})).unwrap();
        let b = spec_echo("scan", &json!({"a": 0.3, "mu": 0.001})).unwrap();
        assert_eq!(short_hash(&a), short_hash(&b));
        assert_ne!(short_hash(&a), short_hash(&spec_echo("scan", &json!({"a": 0.4})).unwrap()));
        let dir = tempfile::tempdir().unwrap();
        let p = write_outputs(dir.path(), "scan", &a, &Table::new(&["x"]), 0).unwrap();
        let name = p.csv.file_name().unwrap().to_str().unwrap();
        assert!(name.starts_with("scan-") && name.ends_with(&format!("-{}.csv", short_hash(&a))));
    }
}
