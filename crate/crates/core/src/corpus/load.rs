use std::collections::HashSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub statement: String,
    pub status: String,
}

impl RawRecord {
    pub fn new(id: impl Into<String>, statement: impl Into<String>, status: impl Into<String>) -> Self {
        RawRecord {
            id: id.into(),
            statement: statement.into(),
            status: status.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoadedCorpus {
    pub records: Vec<RawRecord>,
    /// Rows skipped because their statement was empty or whitespace.
    pub dropped_empty: usize,
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<LoadedCorpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file)
}

/// Writes records with an `id,statement,status` header, quoting as needed.
pub fn write_csv<W: std::io::Write>(records: &[RawRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::io("<csv output>", std::io::Error::other(e.to_string()));
    w.write_record(["id", "statement", "status"]).map_err(io)?;
    for r in records {
        w.write_record([&r.id, &r.statement, &r.status]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))
}

/// Reads an RFC-4180 CSV with a header row holding `id`, `statement` and
/// `status` (any order, extra columns ignored). A blank first header is taken
/// as the id column, which is how pandas writes an exported index.
pub fn parse_csv<R: Read>(reader: R) -> Result<LoadedCorpus> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let statement_col = find("statement").ok_or_else(|| Error::MissingColumn("statement".into()))?;
    let status_col = find("status").ok_or_else(|| Error::MissingColumn("status".into()))?;
    let id_col = find("id")
        .or_else(|| (headers.get(0).map(str::trim) == Some("")).then_some(0))
        .ok_or_else(|| Error::MissingColumn("id".into()))?;

    let mut corpus = LoadedCorpus::default();
    let mut seen = HashSet::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |col: usize| row.get(col).unwrap_or("");
        let id = field(id_col).trim();
        let status = field(status_col).trim();
        let statement = field(statement_col);
        if id.is_empty() {
            return Err(Error::MalformedRow {
                line,
                message: "empty id".into(),
            });
        }
        if statement.trim().is_empty() {
            corpus.dropped_empty += 1;
            continue;
        }
        if status.is_empty() {
            return Err(Error::MalformedRow {
                line,
                message: "empty status".into(),
            });
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        corpus.records.push(RawRecord::new(id, statement, status));
    }
    Ok(corpus)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::MalformedRow {
        line,
        message: e.to_string(),
    }
}
