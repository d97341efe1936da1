//! Deterministic number formatting and file writing.

use std::path::Path;

use polycycle_core::rational::display;
use polycycle_core::Rational;

use crate::CliError;

/// Shortest decimal string that reads back to the same `f64`.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

pub fn rational(x: &Rational) -> String {
    display(x)
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let fail = |e: &dyn std::fmt::Display| {
        CliError::Input(format!("cannot write {}: {e}", path.display()))
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| fail(&e))?;
    w.write_record(header).map_err(|e| fail(&e))?;
    for row in rows {
        w.write_record(row).map_err(|e| fail(&e))?;
    }
    w.flush().map_err(|e| fail(&e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("cannot serialise {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
