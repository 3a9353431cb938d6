//! CSV series input and output, float formatting and file digests.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stable_arma_core::diagnostics::log_returns;

use crate::error::{CliError, CliResult};

/// A series read from CSV. `adj_close` prices are turned into log returns,
/// in which case `dates` is shifted to the return dates.
#[derive(Clone, Debug, PartialEq)]
pub struct InputSeries {
    pub values: Vec<f64>,
    pub column: String,
    /// Data rows in the file.
    pub rows: usize,
    pub dates: Option<Vec<String>>,
    pub log_returns: bool,
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn read_series(path: &Path) -> CliResult<InputSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let (index, column) = match (find("value"), find("adj_close")) {
        (Some(i), _) => (i, "value"),
        (None, Some(i)) => (i, "adj_close"),
        (None, None) => {
            return Err(CliError::input(format!("{}: no `value` or `adj_close` column", path.display())));
        }
    };
    let date_index = find("date");
    let mut values = Vec::new();
    let mut dates = date_index.map(|_| Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let field = record.get(index).unwrap_or("");
        let v: f64 = field
            .parse()
            .map_err(|_| CliError::input(format!("{}:{line}: cannot parse {field:?} as a number", path.display())))?;
        if !v.is_finite() {
            return Err(CliError::input(format!("{}:{line}: non-finite value", path.display())));
        }
        values.push(v);
        if let (Some(d), Some(i)) = (dates.as_mut(), date_index) {
            d.push(record.get(i).unwrap_or("").to_string());
        }
    }
    let rows = values.len();
    if rows == 0 {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    if column == "adj_close" {
        let returns = log_returns(&values).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if let Some(d) = dates.as_mut() {
            d.remove(0);
        }
        return Ok(InputSeries {
            values: returns.into_values(),
            column: column.into(),
            rows,
            dates,
            log_returns: true,
        });
    }
    Ok(InputSeries { values, column: column.into(), rows, dates, log_returns: false })
}

/// Writes a header row and data rows.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One-column `value` CSV, with a leading `date` column when dates are given.
pub fn write_series(path: &Path, values: &[f64], dates: Option<&[String]>) -> CliResult<()> {
    match dates {
        Some(d) => {
            write_table(path, &["date", "value"], d.iter().zip(values).map(|(d, v)| vec![d.clone(), fmt_f64(*v)]))
        }
        None => write_table(path, &["value"], values.iter().map(|v| vec![fmt_f64(*v)])),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(sha256_hex(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0, -0.0, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn empty_digest() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
