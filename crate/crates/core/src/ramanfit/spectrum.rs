//! Two- or three-column gain spectrum tables.
//!
//! Each data line holds `frequency gain [weight]`, separated by whitespace,
//! commas or semicolons. Lines starting with `#`, `%` or `//` are comments.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::GainSpectrumSample;
use crate::model::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    Terahertz,
    Wavenumber,
    Dimensionless,
}

impl FrequencyUnit {
    /// Dimensionless `Ω = ω t₀` for a value in this unit.
    pub fn to_omega(self, value: f64, t0: Option<f64>) -> Result<f64, SpectrumError> {
        let angular = match self {
            FrequencyUnit::Dimensionless => return Ok(value),
            FrequencyUnit::Terahertz => 2.0 * PI * value * 1e12,
            FrequencyUnit::Wavenumber => 2.0 * PI * SPEED_OF_LIGHT * value * 100.0,
        };
        match t0 {
            Some(t0) if t0.is_finite() && t0 > 0.0 => Ok(angular * t0),
            _ => Err(SpectrumError::MissingTimeScale(self)),
        }
    }
}

impl fmt::Display for FrequencyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrequencyUnit::Terahertz => "thz",
            FrequencyUnit::Wavenumber => "cm-1",
            FrequencyUnit::Dimensionless => "omega",
        })
    }
}

impl FromStr for FrequencyUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "thz" => Ok(FrequencyUnit::Terahertz),
            "cm-1" | "cm^-1" | "wavenumber" => Ok(FrequencyUnit::Wavenumber),
            "omega" | "dimensionless" => Ok(FrequencyUnit::Dimensionless),
            other => Err(format!(
                "unknown frequency unit '{other}' (thz, cm-1, omega)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("spectrum table has no data")]
    Empty,
    #[error("unit {0} needs a time scale t0 to convert to dimensionless frequency")]
    MissingTimeScale(FrequencyUnit),
}

fn line_error(line: usize, message: impl Into<String>) -> SpectrumError {
    SpectrumError::Line {
        line,
        message: message.into(),
    }
}

/// Reads a gain table and converts frequencies to `Ω = ω t₀`.
pub fn parse_spectrum_table(
    text: &str,
    unit: FrequencyUnit,
    t0: Option<f64>,
) -> Result<Vec<GainSpectrumSample>, SpectrumError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty()
            || trimmed.starts_with('#')
            || trimmed.starts_with('%')
            || trimmed.starts_with("//")
        {
            continue;
        }
        let fields: Vec<&str> = trimmed
            .split(|c: char| c.is_whitespace() || c == ',' || c == ';')
            .filter(|s| !s.is_empty())
            .collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(line_error(
                line,
                format!("expected 2 or 3 columns, found {}", fields.len()),
            ));
        }
        let mut values = [0.0, 0.0, 1.0];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field
                .parse::<f64>()
                .map_err(|_| line_error(line, format!("'{field}' is not a number")))?;
            if !slot.is_finite() {
                return Err(line_error(line, format!("'{field}' is not finite")));
            }
        }
        let [freq, gain, weight] = values;
        if freq < 0.0 {
            return Err(line_error(line, "frequency must be non-negative"));
        }
        if gain < 0.0 {
            return Err(line_error(line, "gain must be non-negative"));
        }
        if weight <= 0.0 {
            return Err(line_error(line, "weight must be positive"));
        }
        out.push(GainSpectrumSample {
            omega: unit.to_omega(freq, t0)?,
            gain,
            weight,
        });
    }
    if out.is_empty() {
        return Err(SpectrumError::Empty);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_columns_and_comments() {
        let text = "# header\n% also\n\n1.0 0.5\n2.0, 0.25, 3\n// end\n";
        let s = parse_spectrum_table(text, FrequencyUnit::Dimensionless, None).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            s[1],
            GainSpectrumSample {
                omega: 2.0,
                gain: 0.25,
                weight: 3.0
            }
        );
    }

    #[test]
    fn converts_units() {
        let thz = parse_spectrum_table("13.2 1", FrequencyUnit::Terahertz, Some(1e-13)).unwrap();
        assert!((thz[0].omega - 2.0 * PI * 1.32).abs() < 1e-12);
        // 440 cm⁻¹ ≈ 13.19 THz
        let wn = parse_spectrum_table("440 1", FrequencyUnit::Wavenumber, Some(1e-13)).unwrap();
        assert!((wn[0].omega / (2.0 * PI * 0.1) - 13.19).abs() < 0.01);
        assert_eq!(
            parse_spectrum_table("1 1", FrequencyUnit::Terahertz, None),
            Err(SpectrumError::MissingTimeScale(FrequencyUnit::Terahertz))
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            parse_spectrum_table("", FrequencyUnit::Dimensionless, None),
            Err(SpectrumError::Empty)
        );
        assert_eq!(
            parse_spectrum_table("# only\n", FrequencyUnit::Dimensionless, None),
            Err(SpectrumError::Empty)
        );
        for bad in ["1", "1 2 3 4", "x 1", "-1 1", "1 -1", "1 1 0", "nan 1"] {
            assert!(
                parse_spectrum_table(bad, FrequencyUnit::Dimensionless, None).is_err(),
                "{bad}"
            );
        }
    }
}
