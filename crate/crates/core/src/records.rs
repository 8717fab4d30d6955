//! Line-delimited record files, optionally gzip-compressed.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Read a whole file as UTF-8, transparently decompressing gzip.
pub fn read_text(path: &Path) -> Result<String, RecordError> {
    let io_err = |source| RecordError::Io {
        path: path.to_owned(),
        source,
    };
    let bytes = std::fs::read(path).map_err(io_err)?;
    let bytes = if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(&bytes[..])
            .read_to_end(&mut out)
            .map_err(io_err)?;
        out
    } else {
        bytes
    };
    String::from_utf8(bytes).map_err(|e| RecordError::Malformed {
        path: path.to_owned(),
        line: 0,
        message: format!("not UTF-8: {e}"),
    })
}

/// Parse records from a JSON array or from JSON lines (blank lines skipped).
pub fn parse_records<T: DeserializeOwned>(path: &Path, text: &str) -> Result<Vec<T>, RecordError> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| RecordError::Malformed {
            path: path.to_owned(),
            line: e.line(),
            message: e.to_string(),
        });
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| RecordError::Malformed {
                path: path.to_owned(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, RecordError> {
    let text = read_text(path)?;
    parse_records(path, &text)
}

/// Serialize records as JSON lines.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        // Plain data types only; serialization cannot fail.
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), RecordError> {
    let io_err = |source| RecordError::Io {
        path: path.to_owned(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    w.write_all(to_jsonl(records).as_bytes()).map_err(io_err)?;
    w.flush().map_err(io_err)
}
