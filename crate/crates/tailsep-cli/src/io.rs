//! CSV input and formatted-output plumbing shared by every subcommand.
//!
//! ## Conventions
//! - Input files are headered CSV. A column is selected by header name
//!   first; if no header matches and the selector parses as an integer, it
//!   is a 0-based column index.
//! - Empty cells and unparseable or non-finite numbers are hard errors
//!   quoting the 1-based file line — no silent cleaning or imputation.
//! - CSV output cells use `{:.16e}` (17 significant digits, `.` decimal).

use std::path::{Path, PathBuf};

use tailsep::{Error, Result};

/// Read one numeric column from a headered CSV file.
pub fn read_column(path: &Path, selector: &str) -> Result<Vec<f64>> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    // The CSV reader silently skips blank records, which would turn a
    // missing value in a single-column file into silent cleaning.
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            return Err(Error::input(format!(
                "blank line {} in {}",
                i + 1,
                path.display()
            )));
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::input(format!("cannot read header of {}: {e}", path.display())))?
        .clone();
    let index = match headers.iter().position(|h| h == selector) {
        Some(i) => i,
        None => {
            let i: usize = selector.parse().map_err(|_| {
                Error::input(format!(
                    "column '{selector}' matches no header of {} and is not an index; \
                     headers are [{}]",
                    path.display(),
                    headers.iter().collect::<Vec<_>>().join(", ")
                ))
            })?;
            if i >= headers.len() {
                return Err(Error::input(format!(
                    "column index {i} out of range: {} has {} columns",
                    path.display(),
                    headers.len()
                )));
            }
            i
        }
    };

    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        let line = row + 2; // 1-based, counting the header line
        let cell = record
            .get(index)
            .ok_or_else(|| Error::input(format!("line {line} has no column {index}")))?;
        if cell.is_empty() {
            return Err(Error::input(format!(
                "missing value in column '{selector}' at line {line}"
            )));
        }
        let value: f64 = cell.parse().map_err(|_| {
            Error::input(format!("cannot parse '{cell}' at line {line} as a number"))
        })?;
        if !value.is_finite() {
            return Err(Error::input(format!("non-finite value '{cell}' at line {line}")));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::input(format!("{} contains no data rows", path.display())));
    }
    Ok(values)
}

/// Print to stdout, or write to the chosen file.
pub fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Close a csv::Writer over a byte buffer and return its contents.
pub fn csv_into_string(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::input(format!("CSV write failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::input(format!("CSV not UTF-8: {e}")))
}

/// Full-precision float cell.
pub fn cell(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with a trailing newline.
pub fn pretty_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::input(format!("JSON serialization failed: {e}")))
}
