//! Unit-suffixed quantities for scenario files.
//!
//! Scenario fields that carry a physical dimension are written as strings
//! with an explicit unit, e.g. "5 MHz", "10 ms", "5 kbps", "5e-15 W".
//! Every field knows which dimension it expects; parsing converts to SI
//! base units (Hz, bits/second, seconds, Watts) and rejects suffixes of
//! the wrong dimension, so a delay can never silently land in a rate
//! field. Suffix matching is case-sensitive ("mW" and "MW" differ).
//!
//! Serialization writes the SI value with the base unit ("5000000 Hz");
//! Rust's shortest round-trip float formatting guarantees that parsing
//! the serialized form recovers the identical value.

use std::fmt;

/// The physical dimension a scenario field expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Rate,
    Time,
    Power,
}

impl Dimension {
    /// Recognized suffixes and their SI factors, base unit first.
    fn suffixes(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Frequency => &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)],
            Dimension::Rate => &[("bps", 1.0), ("kbps", 1e3), ("Mbps", 1e6), ("Gbps", 1e9)],
            Dimension::Time => &[
                ("s", 1.0),
                ("ms", 1e-3),
                ("us", 1e-6),
                ("min", 60.0),
            ],
            Dimension::Power => &[
                ("W", 1.0),
                ("mW", 1e-3),
                ("uW", 1e-6),
                ("nW", 1e-9),
                ("pW", 1e-12),
                ("fW", 1e-15),
            ],
        }
    }

    /// The SI base unit this dimension serializes with.
    pub fn base_unit(self) -> &'static str {
        self.suffixes()[0].0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Frequency => "frequency",
            Dimension::Rate => "rate",
            Dimension::Time => "time",
            Dimension::Power => "power",
        };
        f.write_str(name)
    }
}

/// Parses "NUMBER UNIT" (whitespace between them optional) into the SI
/// base value of `dim`. The error message names the offending text, the
/// expected dimension, and the accepted suffixes.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let trimmed = text.trim();
    let split = trimmed
        .char_indices()
        .find(|&(_, c)| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .map(|(i, _)| i);
    // A digit/exponent prefix followed by the unit. 'e'/'E' are kept in
    // the numeric part so "5e-15 W" parses.
    let Some(at) = split else {
        return Err(format!(
            "missing unit in {trimmed:?}: expected a {dim} like \"{} {}\"",
            example_value(dim),
            dim.base_unit()
        ));
    };
    let (num_part, unit_part) = trimmed.split_at(at);
    let unit = unit_part.trim();
    let value: f64 = num_part
        .trim()
        .parse()
        .map_err(|_| format!("invalid number {:?} in {trimmed:?}", num_part.trim()))?;
    let factor = dim
        .suffixes()
        .iter()
        .find(|&&(s, _)| s == unit)
        .map(|&(_, f)| f)
        .ok_or_else(|| {
            format!(
                "unknown {dim} unit {unit:?} in {trimmed:?} (accepted: {})",
                dim.suffixes()
                    .iter()
                    .map(|&(s, _)| s)
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })?;
    let si = value * factor;
    if !si.is_finite() {
        return Err(format!("non-finite quantity {trimmed:?}"));
    }
    Ok(si)
}

/// Serializes an SI value with its base unit, e.g. `5000000 Hz`. The
/// shortest round-trip float formatting makes parse(format(x)) == x.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    format!("{value} {}", dim.base_unit())
}

fn example_value(dim: Dimension) -> &'static str {
    match dim {
        Dimension::Frequency => "5000000",
        Dimension::Rate => "5000",
        Dimension::Time => "0.01",
        Dimension::Power => "5e-15",
    }
}
