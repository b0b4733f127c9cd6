use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::run::{ResultTable, Summary};

const SIGNIFICANT: i32 = 12;

/// Twelve significant digits; fixed notation for moderate magnitudes,
/// scientific otherwise.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        return format!("{:.*}", (SIGNIFICANT - 1) as usize, 0.0);
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, v);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..SIGNIFICANT).contains(&exp) {
        format!("{:.*}", (SIGNIFICANT - 1 - exp) as usize, v)
    } else {
        sci
    }
}

pub fn write_csv<W: Write>(table: &ResultTable, sink: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| format_value(*v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<(), CliError> {
    if table.rows.is_empty() {
        return Err(CliError::validation(
            "table",
            "refusing to write an empty table",
        ));
    }
    let mut bytes = Vec::new();
    write_csv(table, &mut bytes).expect("writing to memory");
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// `out.csv` -> `out.json`.
pub fn sidecar_path(csv: &Path) -> Result<PathBuf, CliError> {
    if csv.extension().is_some_and(|e| e == "json") {
        return Err(CliError::validation(
            "output",
            "output path must not end in .json",
        ));
    }
    Ok(csv.with_extension("json"))
}

pub fn emit_summary(summary: &Summary, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
