//! Report envelopes and CSV emitters.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub path: PathBuf,
    /// SHA-256 of the input file bytes.
    pub sha256: String,
    pub rows: usize,
    pub cols: usize,
}

/// Every JSON report carries the schema version, the resolved configuration
/// and the input fingerprint next to the command's own result.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: &'a C,
    pub input: &'a InputInfo,
    pub result: T,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(format!("creating {}", parent.display()), e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

/// Writes to `out` when given, otherwise to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:e}")
    }
}

/// CSV with a leading `schema_version` column.
pub struct CsvTable {
    text: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = String::from("schema_version");
        for h in header {
            text.push(',');
            text.push_str(h);
        }
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = write!(self.text, "{SCHEMA_VERSION}");
        for c in cells {
            self.text.push(',');
            if c.contains([',', '"', '\n']) {
                let _ = write!(self.text, "\"{}\"", c.replace('"', "\"\""));
            } else {
                self.text.push_str(c);
            }
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}
