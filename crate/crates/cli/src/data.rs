//! Income data ingestion.
//!
//! One income per line by default. Files with several comma- or
//! whitespace-separated fields need a 1-based column selector. Blank lines
//! are ignored and a single header line can be skipped.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: income must be positive and finite, got {value}")]
    NotPositive { line: usize, value: f64 },
    #[error("no income values found")]
    Empty,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    pub skip_header: bool,
    /// 1-based column index for multi-column files.
    pub column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub path: PathBuf,
    pub values: Vec<f64>,
}

pub fn read_incomes(path: &Path, opts: ReadOptions) -> Result<DataFile, DataError> {
    let text =
        fs::read_to_string(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
    Ok(DataFile { path: path.to_path_buf(), values: parse_incomes(&text, opts)? })
}

pub fn parse_incomes(text: &str, opts: ReadOptions) -> Result<Vec<f64>, DataError> {
    let mut values = Vec::new();
    let mut header_pending = opts.skip_header;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let fields: Vec<&str> =
            trimmed.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let field = match opts.column {
            Some(0) => return Err(DataError::Parse { line, message: "columns are numbered from 1".into() }),
            Some(k) => *fields.get(k - 1).ok_or_else(|| DataError::Parse {
                line,
                message: format!("column {k} requested but the line has {} fields", fields.len()),
            })?,
            None if fields.len() == 1 => fields[0],
            None => {
                return Err(DataError::Parse {
                    line,
                    message: format!("{} fields found; select one with --column", fields.len()),
                })
            }
        };
        let value: f64 = field
            .parse()
            .map_err(|_| DataError::Parse { line, message: format!("not a number: {field:?}") })?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(DataError::NotPositive { line, value });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(values)
}
