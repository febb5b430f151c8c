//! Minimal CSV reading/writing for the experiment tables.
//!
//! All tables produced here are plain comma-separated text with a single
//! header row. Cell values never contain commas, quotes, or newlines, so no
//! quoting rules are needed; writers assert this invariant instead of
//! escaping. Floating-point cells use a fixed scientific format so that
//! identical inputs always serialize to identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use crate::Failure;

/// Fixed rendering for floating-point cells: nine significant digits,
/// scientific notation. Deterministic and round-trippable for every value
/// the tools emit.
pub fn fmt_float(value: f64) -> String {
    format!("{value:.8e}")
}

/// An in-memory table: one header row plus data rows of equal width.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        let header: Vec<String> = header.into_iter().map(Into::into).collect();
        assert!(!header.is_empty());
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(
            cells.len(),
            self.header.len(),
            "row width must match the header"
        );
        for cell in &cells {
            assert!(
                !cell.contains([',', '"', '\n', '\r']),
                "cell {cell:?} would require CSV quoting"
            );
        }
        self.rows.push(cells);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Index of a named column, or an error naming the missing column.
    pub fn column(&self, name: &str) -> Result<usize, Failure> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::Usage(format!("input table has no `{name}` column")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    /// Write the table to `path`, or to standard output when no path is given.
    pub fn write(&self, path: Option<&Path>) -> io::Result<()> {
        let text = self.to_csv();
        match path {
            Some(path) => fs::write(path, text),
            None => io::stdout().write_all(text.as_bytes()),
        }
    }

    /// Parse CSV text produced by [`Table::to_csv`] (or any unquoted CSV).
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut lines = text.lines().filter(|line| !line.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Failure::Usage("input table is empty".into()))?
            .split(',')
            .map(|cell| cell.trim().to_string())
            .collect();
        let mut table = Self {
            header,
            rows: Vec::new(),
        };
        for (i, line) in lines.enumerate() {
            let cells: Vec<String> = line
                .split(',')
                .map(|cell| cell.trim().to_string())
                .collect();
            if cells.len() != table.header.len() {
                return Err(Failure::Usage(format!(
                    "row {} has {} cells, expected {}",
                    i + 2,
                    cells.len(),
                    table.header.len()
                )));
            }
            table.rows.push(cells);
        }
        Ok(table)
    }
}

/// Parse a cell that is expected to hold a floating-point number.
pub fn parse_float(cell: &str, context: &str) -> Result<f64, Failure> {
    cell.parse::<f64>()
        .map_err(|_| Failure::Usage(format!("{context}: `{cell}` is not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_round_trip_through_csv_text() {
        let mut table = Table::new(vec!["a", "b"]);
        table.push_row(vec!["1".into(), fmt_float(0.05)]);
        table.push_row(vec!["2".into(), fmt_float(1.0 / 3.0)]);
        let text = table.to_csv();
        let back = Table::parse(&text).unwrap();
        assert_eq!(back.rows(), table.rows());
        assert_eq!(back.column("b").unwrap(), 1);
        assert!(back.column("missing").is_err());
    }

    #[test]
    fn float_cells_preserve_nine_significant_digits() {
        for &x in &[0.05, 8333.25, 1e-12, 0.0] {
            let cell = fmt_float(x);
            assert_eq!(parse_float(&cell, "test").unwrap(), x);
        }
        let third = parse_float(&fmt_float(1.0 / 3.0), "test").unwrap();
        assert!((third - 1.0 / 3.0).abs() < 1e-9);
    }
}
