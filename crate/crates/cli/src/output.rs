//! CSV emission: mandatory header, `.` decimals, LF line endings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// An in-memory CSV table; floats use Rust's shortest round-trip formatting.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|f| escape(f)).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn write_to(&self, dir: &Path, file_name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(file_name);
        std::fs::write(&path, self.render()).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}
