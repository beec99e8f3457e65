//! Locale-independent number formatting and file writers shared by the
//! exporters. Every float leaves the crate with 12 significant digits.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Scientific notation with 12 significant digits, e.g. `7.51125544465e-1`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rounds to 12 significant digits so JSON output is as stable as the CSV.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_float(x).parse().unwrap_or(x)
}

pub(crate) fn round_opt(x: Option<f64>) -> Option<f64> {
    x.map(round_sig)
}

/// Writes a header line followed by rows of formatted floats.
pub fn write_csv<W: Write>(mut out: W, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    writeln!(out, "{header}")?;
    let mut line = String::new();
    for row in rows {
        line.clear();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&fmt_float(*v));
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| crate::Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

pub(crate) fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let file = std::fs::File::create(path)
        .map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(file))
}
