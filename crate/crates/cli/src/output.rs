//! CSV tables and how they reach disk.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &'static str, header: &[&'static str]) -> Self {
        Self {
            file,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes every table into `dir`. Each file goes to a temporary name first
/// and is renamed into place, so a failed run leaves no truncated CSV.
pub fn write_tables(dir: &Path, tables: &[Table], extra: &[(&str, String)]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    for t in tables {
        files.push((dir.join(t.file), t.to_csv()?));
    }
    for (name, text) in extra {
        files.push((dir.join(name), text.clone().into_bytes()));
    }
    let mut staged = Vec::new();
    for (path, bytes) in &files {
        let tmp = path.with_extension("partial");
        if let Err(e) = fs::write(&tmp, bytes) {
            for t in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(io_err(&tmp, e));
        }
        staged.push(tmp);
    }
    for ((path, _), tmp) in files.iter().zip(&staged) {
        fs::rename(tmp, path).map_err(|e| io_err(path, e))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
