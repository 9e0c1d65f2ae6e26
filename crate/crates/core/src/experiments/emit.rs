//! CSV and Markdown output of convergence tables.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::sweep::ConvergenceTable;

pub const COLUMNS: [&str; 13] = [
    "inv_h", "tri_norm", "tri_rate", "l2_e0", "l2_rate", "eb", "eb_rate", "eg", "eg_rate", "h2c", "h2c_rate", "h1c",
    "h1c_rate",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::Argument(format!("unknown format `{other}` (expected csv or markdown)"))),
        }
    }
}

/// Three significant digits with a signed two-digit exponent, e.g. `8.73e-02`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

fn rate_cell(r: Option<f64>) -> String {
    match r {
        Some(v) if v.is_finite() => format!("{v:.2}"),
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

/// Cell strings per row, in [`COLUMNS`] order.
pub fn cells(table: &ConvergenceTable) -> Vec<Vec<String>> {
    table
        .rows
        .iter()
        .map(|row| {
            let vals = row.errors.values();
            let mut out = vec![row.inv_h.to_string()];
            for (i, v) in vals.iter().enumerate() {
                out.push(sci(*v));
                out.push(rate_cell(row.rates.map(|r| r[i])));
            }
            out
        })
        .collect()
}

pub fn render(table: &ConvergenceTable, format: Format) -> String {
    let rows = cells(table);
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str(&COLUMNS.join(","));
            s.push('\n');
            for r in rows {
                s.push_str(&r.join(","));
                s.push('\n');
            }
        }
        Format::Markdown => {
            let _ = writeln!(s, "| {} |", COLUMNS.join(" | "));
            let _ = writeln!(s, "|{}", "---|".repeat(COLUMNS.len()));
            for r in rows {
                let _ = writeln!(s, "| {} |", r.join(" | "));
            }
        }
    }
    s
}

pub fn emit(table: &ConvergenceTable, format: Format, path: &Path) -> Result<()> {
    std::fs::write(path, render(table, format))?;
    Ok(())
}

/// Parses Markdown produced by [`render`] back into cell strings.
pub fn parse_markdown(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(2)
        .filter(|l| l.starts_with('|'))
        .map(|l| {
            l.trim().trim_start_matches('|').trim_end_matches('|').split('|').map(|c| c.trim().to_string()).collect()
        })
        .collect()
}
