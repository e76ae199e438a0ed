//! Line-delimited JSON helpers shared by every on-disk record format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Records parsed from a JSONL file plus the number of lines that failed to parse.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub malformed: usize,
}

/// Reads every parseable line. Blank lines are ignored; malformed lines are
/// counted and logged, never fatal.
pub fn read_lenient<T: DeserializeOwned>(path: &Path) -> Result<Loaded<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    let mut malformed = 0;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<T>(&line) {
            Ok(rec) => records.push(rec),
            Err(err) => {
                log::warn!("{}:{}: skipping malformed line: {err}", path.display(), idx + 1);
                malformed += 1;
            }
        }
    }
    Ok(Loaded { records, malformed })
}

/// Reads every line, failing on the first malformed one.
pub fn read_strict<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        records.push(rec);
    }
    Ok(records)
}

pub fn write<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for rec in records {
        let line = serde_json::to_string(rec).map_err(|e| Error::Invalid(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
