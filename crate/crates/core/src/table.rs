//! Labelled result tables and their CSV form.
//!
//! The CSV layout is fixed: one header row, `,` separators, LF line endings,
//! numbers printed with 12 significant digits, empty fields for values that
//! do not exist at that row (e.g. a boundary that is a sentinel).

use std::fmt::Write as _;
use std::io;

use crate::error::TableError;

/// Significant digits of every number written to CSV.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_significant(*v, SIGNIFICANT_DIGITS),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn parse(field: &str) -> Cell {
        if field.is_empty() {
            Cell::Missing
        } else {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Cell::Num(v),
                _ => Cell::Text(field.to_owned()),
            }
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl SweepTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        SweepTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<(), TableError> {
        let index = self.rows.len();
        if row.len() != self.columns.len() {
            return Err(TableError::Arity {
                row: index,
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        for (cell, column) in row.iter().zip(&self.columns) {
            if let Cell::Num(v) = cell {
                if !v.is_finite() {
                    return Err(TableError::NonFinite {
                        row: index,
                        column: column.clone(),
                        value: *v,
                    });
                }
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Result<usize, TableError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| TableError::NoColumn(name.to_owned()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<&Cell>, TableError> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric entries of a column, skipping missing and text cells.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>, TableError> {
        Ok(self
            .column(name)?
            .into_iter()
            .filter_map(Cell::as_f64)
            .collect())
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), TableError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.flush().map_err(|e| TableError::Csv(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing csv to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self, TableError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let mut table = SweepTable::new(reader.headers()?.iter());
        for record in reader.records() {
            table.push_row(record?.iter().map(Cell::parse).collect())?;
        }
        Ok(table)
    }
}

/// `printf("%.*g")`-style formatting: `digits` significant digits, trailing
/// zeros dropped, scientific notation outside `[1e-5, 10^digits)`.
pub fn format_significant(value: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if value == 0.0 {
        return "0".to_owned();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -5 || exponent >= digits as i32 {
        let mut s = trim_fraction(mantissa).to_owned();
        let _ = write!(s, "e{exponent}");
        s
    } else {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        trim_fraction(&format!("{value:.decimals$}")).to_owned()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn significant_formatting() {
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(0.25, 12), "0.25");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(-2.5, 12), "-2.5");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(0.9999999999996, 12), "1");
        assert_eq!(format_significant(123456.789, 12), "123456.789");
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_significant(2.0e13, 12), "2e13");
        assert_eq!(format_significant(0.000012345, 12), "0.000012345");
    }

    #[test]
    fn csv_layout() {
        let mut t = SweepTable::new(["p", "omega_star", "status"]);
        t.push_row(vec![0.0.into(), 1.0.into(), "ok".into()])
            .unwrap();
        t.push_row(vec![0.2.into(), Cell::Missing, "ALL_UNSECURED".into()])
            .unwrap();
        assert_eq!(
            t.to_csv(),
            "p,omega_star,status\n0,1,ok\n0.2,,ALL_UNSECURED\n"
        );
        assert_eq!(SweepTable::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut t = SweepTable::new(["a", "b"]);
        assert!(matches!(
            t.push_row(vec![1.0.into()]),
            Err(TableError::Arity {
                expected: 2,
                got: 1,
                ..
            })
        ));
        assert!(matches!(
            t.push_row(vec![1.0.into(), f64::NAN.into()]),
            Err(TableError::NonFinite { .. })
        ));
        assert!(t.is_empty());
        assert!(SweepTable::from_csv("a,b\n1\n").is_err());
        assert!(t.column("c").is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(values in proptest::collection::vec(
            prop_oneof![-1e300f64..1e300, -1.0f64..1.0, 0.0f64..1e-9], 1..20)
        ) {
            let mut t = SweepTable::new(["x", "label"]);
            for v in &values {
                t.push_row(vec![(*v).into(), "row".into()]).unwrap();
            }
            let csv = t.to_csv();
            let back = SweepTable::from_csv(&csv).unwrap();
            prop_assert_eq!(back.to_csv(), csv);
            for (v, parsed) in values.iter().zip(back.numeric_column("x").unwrap()) {
                prop_assert!((v - parsed).abs() <= 5e-12 * v.abs());
            }
        }
    }
}
