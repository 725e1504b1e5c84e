//! CSV tables with a fixed numeric format: scientific notation, 15
//! significant digits, `.` decimal separator, `,` field separator, header
//! row first.

use std::fmt::Write as _;
use std::io::{self, Write};

/// `x` with 15 significant digits, e.g. `-1.23456789012345e-3`.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// # Panics
    /// If the row width differs from the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|x| num(*x)).collect());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.render().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::excessive_precision)]
    fn fifteen_significant_digits() {
        assert_eq!(num(1.0), "1.00000000000000e0");
        assert_eq!(num(-0.000123456789012345678), "-1.23456789012346e-4");
        assert_eq!(num(std::f64::consts::PI), "3.14159265358979e0");
    }

    #[test]
    fn render_has_header_and_rows() {
        let mut t = CsvTable::new(&["x", "y"]);
        t.push_numbers(&[0.5, 2.0]);
        t.push(vec!["a".into(), "b".into()]);
        assert_eq!(t.render(), "x,y\n5.00000000000000e-1,2.00000000000000e0\na,b\n");
        assert_eq!(t.len(), 2);
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn ragged_rows_are_rejected() {
        CsvTable::new(&["x"]).push_numbers(&[1.0, 2.0]);
    }
}
