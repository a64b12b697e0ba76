//! FASTA reader for plain or gzip-compressed input with line-numbered errors.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    /// First whitespace-delimited token of the header.
    pub id: String,
    /// Remainder of the header line, if any.
    pub description: String,
    pub seq: Vec<u8>,
    /// 1-based line number of the header.
    pub line: usize,
}

#[derive(Debug, Error)]
pub enum FastaError {
    #[error("line {line}: sequence data before the first header")]
    DataBeforeHeader { line: usize },
    #[error("line {line}: header has no identifier")]
    EmptyId { line: usize },
    #[error("line {line}: record `{id}` has no sequence")]
    EmptyRecord { line: usize, id: String },
    #[error("line {line}: invalid character {ch:?} in sequence")]
    InvalidCharacter { line: usize, ch: char },
    #[error("line {line}: duplicate record identifier `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: header is not valid UTF-8")]
    BadHeader { line: usize },
    #[error("no FASTA records")]
    NoRecords,
    #[error("line {line}: {source}")]
    Io { line: usize, source: std::io::Error },
}

/// Parse every record. Blank lines and `;` comment lines are ignored; spaces
/// and a trailing `\r` inside sequence lines are stripped. Sequence lines may
/// contain letters and `*` only.
pub fn parse<R: BufRead>(mut reader: R) -> Result<Vec<Record>, FastaError> {
    let mut records: Vec<Record> = Vec::new();
    let mut seen = HashSet::new();
    let mut buf = Vec::new();
    let mut line = 0;
    loop {
        buf.clear();
        let read = reader.read_until(b'\n', &mut buf).map_err(|source| FastaError::Io { line: line + 1, source })?;
        if read == 0 {
            break;
        }
        line += 1;
        while matches!(buf.last(), Some(b'\n' | b'\r')) {
            buf.pop();
        }
        match buf.first() {
            None | Some(b';') => continue,
            Some(b'>') => {
                if let Some(prev) = records.last() {
                    if prev.seq.is_empty() {
                        return Err(FastaError::EmptyRecord { line: prev.line, id: prev.id.clone() });
                    }
                }
                let header = std::str::from_utf8(&buf[1..]).map_err(|_| FastaError::BadHeader { line })?.trim();
                let (id, description) = header.split_once(char::is_whitespace).unwrap_or((header, ""));
                if id.is_empty() {
                    return Err(FastaError::EmptyId { line });
                }
                if !seen.insert(id.to_owned()) {
                    return Err(FastaError::DuplicateId { line, id: id.to_owned() });
                }
                records.push(Record {
                    id: id.to_owned(),
                    description: description.trim().to_owned(),
                    seq: Vec::new(),
                    line,
                });
            }
            Some(_) => {
                let Some(rec) = records.last_mut() else {
                    if buf.iter().all(u8::is_ascii_whitespace) {
                        continue;
                    }
                    return Err(FastaError::DataBeforeHeader { line });
                };
                for &b in buf.iter().filter(|b| !b.is_ascii_whitespace()) {
                    if !(b.is_ascii_alphabetic() || b == b'*') {
                        return Err(FastaError::InvalidCharacter { line, ch: b as char });
                    }
                    rec.seq.push(b);
                }
            }
        }
    }
    match records.last() {
        None => Err(FastaError::NoRecords),
        Some(last) if last.seq.is_empty() => Err(FastaError::EmptyRecord { line: last.line, id: last.id.clone() }),
        Some(_) => Ok(records),
    }
}

/// Parse bytes, transparently decompressing gzip input.
pub fn parse_bytes(bytes: &[u8]) -> Result<Vec<Record>, FastaError> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        parse(BufReader::new(MultiGzDecoder::new(bytes)))
    } else {
        parse(bytes)
    }
}

/// Read a FASTA or FASTA.gz file (detected by content, not extension).
pub fn read_path(path: &Path) -> Result<Vec<Record>, FastaError> {
    let mut file = File::open(path).map_err(|source| FastaError::Io { line: 0, source })?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|source| FastaError::Io { line: 0, source })?;
    parse_bytes(&bytes)
}
