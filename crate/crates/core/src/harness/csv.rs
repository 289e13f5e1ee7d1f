//! Numeric CSV tables: header row, `,` separator, LF endings, 12 significant
//! digits. Values are rounded to 12 digits when added, so a table survives a
//! write/parse cycle unchanged.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Result<Self> {
        let header: Vec<String> = header.into_iter().map(Into::into).collect();
        if header.is_empty() {
            return Err(Error::arg("a table needs at least one column"));
        }
        if let Some(bad) = header.iter().find(|h| h.is_empty() || h.contains([',', '\n', '\r'])) {
            return Err(Error::arg(format!("invalid column name '{bad}'")));
        }
        Ok(CsvTable { header, rows: Vec::new() })
    }

    pub fn push_row(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.header.len() {
            return Err(Error::DimensionMismatch { left: values.len(), right: self.header.len() });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::arg(format!("non-finite value {bad}")));
        }
        self.rows.push(values.iter().map(|&v| quantize(v)).collect());
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format_g(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })?;
        let mut table = CsvTable::new(head.split(','))
            .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
        for (i, line) in lines {
            let err = |message: String| Error::Parse { line: i + 1, message };
            let values = line
                .split(',')
                .map(|t| t.parse::<f64>().map_err(|_| err(format!("bad number '{t}'"))))
                .collect::<Result<Vec<_>>>()?;
            table.push_row(&values).map_err(|e| err(e.to_string()))?;
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Formats like C's `%.12g`.
pub fn format_g(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let mut s = trim_fraction(mantissa).to_string();
        let _ = write!(s, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
        s
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The value that [`format_g`] would print.
pub fn quantize(v: f64) -> f64 {
    format_g(v).parse().expect("formatted float parses")
}
