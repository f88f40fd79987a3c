use std::io::Write;

use serde::Serialize;

use crate::args::{Format, OutputArgs};
use crate::error::{CliError, CliResult};

pub type CsvWriter<'a> = csv::Writer<&'a mut Vec<u8>>;

/// Serializes `value` as pretty JSON, or calls `csv` to fill a CSV body,
/// and writes the result to stdout or `--output`.
pub fn emit<T, F>(out: &OutputArgs, value: &T, csv: F) -> CliResult<()>
where
    T: Serialize,
    F: FnOnce(&mut CsvWriter<'_>) -> csv::Result<()>,
{
    let body = match out.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut buf = Vec::new();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                csv(&mut w).map_err(|e| CliError::Output(e.to_string()))?;
                w.flush().map_err(|e| CliError::Output(e.to_string()))?;
            }
            buf
        }
    };
    match &out.output {
        Some(path) => std::fs::write(path, &body).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&body).and_then(|_| stdout.flush()).map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

/// Formats a float for CSV with round-trip precision.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
