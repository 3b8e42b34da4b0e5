//! CSV output: a `#`-prefixed metadata block, one header row, then data rows.
//!
//! Numbers are written with 12 significant digits in scientific notation.
//! Nothing emitted contains a comma, so no quoting is needed.

use std::io::{self, Write};

use crate::run::{Row, NUMERIC_COLUMNS};

pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

fn field(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

fn sanitize(s: &str) -> String {
    s.replace([',', '\n', '\r'], " ")
}

pub fn write_metadata<W: Write>(
    out: &mut W,
    title: &str,
    entries: &[(String, String)],
) -> io::Result<()> {
    writeln!(out, "# {title}")?;
    for (k, v) in entries {
        writeln!(out, "# {k} = {v}")?;
    }
    Ok(())
}

/// Writes sweep rows; `value_column` names the swept variable.
pub fn write_rows<W: Write>(out: &mut W, value_column: &str, rows: &[Row]) -> io::Result<()> {
    let mut header = vec!["curve", value_column];
    header.extend(NUMERIC_COLUMNS);
    header.push("errors");
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let mut cells = vec![sanitize(&r.curve), sanitize(&r.value)];
        cells.extend(r.numeric_fields().into_iter().map(field));
        cells.push(sanitize(&r.errors.join("; ")));
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Parsed CSV: metadata lines (without `# `), column names and raw cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric cell, `None` when empty.
    pub fn number(&self, row: usize, column: &str) -> Option<f64> {
        let c = self.column(column)?;
        let cell = self.rows.get(row)?.get(c)?;
        if cell.is_empty() {
            None
        } else {
            cell.parse().ok()
        }
    }
}

pub fn parse_table(text: &str) -> Table {
    let mut lines = text.lines();
    let mut metadata = Vec::new();
    let mut header = None;
    for line in lines.by_ref() {
        match line.strip_prefix('#') {
            Some(m) => metadata.push(m.trim().to_string()),
            None => {
                header = Some(line);
                break;
            }
        }
    }
    let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
    Table {
        metadata,
        columns: header.map(split).unwrap_or_default(),
        rows: lines.filter(|l| !l.is_empty()).map(split).collect(),
    }
}
