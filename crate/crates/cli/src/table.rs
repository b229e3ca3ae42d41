//! CSV result tables with a `#`-prefixed provenance header.

use std::io::Write;

use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REQUIRED_KEYS: [&str; 5] = ["version", "command", "config_sha256", "seed", "tolerances"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) => format_number(*x),
        }
    }
}

/// Shortest round-trip representation, always in exponent form.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:e}")
    }
}

pub fn config_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub provenance: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable { provenance: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged row");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Rows whose leading text cells equal `keys`.
    pub fn select(&self, keys: &[&str]) -> Vec<&Vec<Cell>> {
        self.rows
            .iter()
            .filter(|r| keys.iter().zip(r.iter()).all(|(k, c)| matches!(c, Cell::Text(s) if s == k)))
            .collect()
    }

    pub fn value(&self, row: &[Cell], column: &str) -> Option<f64> {
        self.column(column).and_then(|i| row[i].num())
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        for (k, v) in &self.provenance {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Checks the provenance header, rectangularity and numeric cells of a written table.
pub fn validate_csv(text: &str, config_text: Option<&str>) -> Result<(), CliError> {
    let mismatch = |m: String| Err(CliError::Mismatch(m));
    let mut header = Vec::new();
    for line in text.lines() {
        match line.strip_prefix("# ") {
            Some(rest) => {
                if let Some((k, v)) = rest.split_once(": ") {
                    header.push((k.to_string(), v.to_string()));
                }
            }
            None => break,
        }
    }
    for key in REQUIRED_KEYS {
        if !header.iter().any(|(k, _)| k == key) {
            return mismatch(format!("provenance header lacks {key}"));
        }
    }
    if let Some(cfg) = config_text {
        let want = config_hash(cfg);
        let got = header.iter().find(|(k, _)| k == "config_sha256").map(|(_, v)| v.as_str());
        if got != Some(want.as_str()) {
            return mismatch("config_sha256 does not match the given config".to_string());
        }
    }
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).flexible(true).from_reader(text.as_bytes());
    let width = rd.headers().map_err(|e| CliError::Mismatch(format!("unreadable header row: {e}")))?.len();
    let mut rows = 0;
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Mismatch(format!("row {i}: {e}")))?;
        if rec.len() != width {
            return mismatch(format!("row {i} has {} cells, header has {width}", rec.len()));
        }
        for (j, cell) in rec.iter().enumerate().skip(2) {
            if cell.parse::<f64>().is_err() {
                return mismatch(format!("row {i} column {j} is not a number: {cell:?}"));
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return mismatch("table has no rows".to_string());
    }
    Ok(())
}
