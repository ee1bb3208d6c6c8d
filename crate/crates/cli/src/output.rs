//! Output rendering: human tables, CSV, and a JSON machine format.
//!
//! Conventions:
//! - CSV is comma-separated with "." as the decimal mark, a mandatory
//!   header row, and numbers shown to at most 6 significant digits —
//!   values that would need more digits in plain decimal switch to
//!   scientific notation.
//! - JSON is one compact line (serde field order), full float precision.
//! - dB conversions appear in human output only; CSV/JSON stay linear.
//! - Human tables round to 6 significant digits unless a column states
//!   otherwise.

use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    /// Aligned tables with units and dB annotations.
    Human,
    /// Comma-separated values with a header row.
    Csv,
    /// One line of JSON.
    Json,
}

/// A command report that can render in all three output modes.
pub trait Report: Serialize {
    fn human(&self) -> String;
    fn csv(&self) -> String;

    fn render(&self, mode: OutputMode) -> Result<String, CliError> {
        match mode {
            OutputMode::Human => Ok(self.human()),
            OutputMode::Csv => Ok(self.csv()),
            OutputMode::Json => serde_json::to_string(self)
                .map(|mut s| {
                    s.push('\n');
                    s
                })
                .map_err(|e| CliError::Config(format!("cannot encode report: {e}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

/// At most `sig` significant digits; plain decimal while it fits (absolute
/// value in [1e-3, 1e6) or zero), scientific beyond. Trailing zeros are
/// trimmed, so exact values stay short ("0.2", "5e-15").
pub fn format_sig(value: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if (-3..6).contains(&magnitude) && magnitude < sig as i32 {
        let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
        trim_decimal(format!("{value:.decimals$}"))
    } else {
        let s = format!("{:.*e}", sig - 1, value);
        let at = s.find('e').expect("exponential format");
        format!("{}{}", trim_decimal(s[..at].to_string()), &s[at..])
    }
}

/// 6 significant digits: the house style for CSV and human tables.
pub fn format_number(value: f64) -> String {
    format_sig(value, 6)
}

fn trim_decimal(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// Renders one CSV line; fields must not contain commas or newlines
/// (scenario labels are validated accordingly).
pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

/// An aligned two-space-separated table for human output.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let emit = |out: &mut String, cells: &[String]| {
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(cell);
            if i + 1 < cells.len() {
                for _ in cell.len()..*w {
                    out.push(' ');
                }
            }
        }
        out.push('\n');
    };
    let header_cells: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    emit(&mut out, &header_cells);
    for row in rows {
        emit(&mut out, row);
    }
    out
}
