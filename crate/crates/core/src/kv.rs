//! Line-oriented `key = value` text with optional `[section]` headers.
//!
//! Grammar, one item per line:
//!
//! ```text
//! # comment            (also after a value: `key = 1.0  # note`)
//! [section]
//! key = value
//! ```
//!
//! Keys are case-sensitive, values are trimmed. Entry order is preserved so
//! repeated keys (sample rows, Lorentzian terms) keep their sequence.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub section: String,
    pub key: String,
    pub value: String,
}

impl Entry {
    pub fn parse<T: FromStr>(&self) -> Result<T, ParseError>
    where
        T::Err: fmt::Display,
    {
        self.value.parse::<T>().map_err(|e| {
            ParseError::new(
                self.line,
                format!("invalid value `{}` for `{}`: {e}", self.value, self.key),
            )
        })
    }

    /// Whitespace- or comma-separated list of numbers.
    pub fn floats(&self) -> Result<Vec<f64>, ParseError> {
        self.value
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    ParseError::new(
                        self.line,
                        format!("`{s}` is not a number in `{}`", self.key),
                    )
                })
            })
            .collect()
    }

    pub fn bool(&self) -> Result<bool, ParseError> {
        match self.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(ParseError::new(
                self.line,
                format!("`{}` expects true/false, got `{}`", self.key, self.value),
            )),
        }
    }
}

pub fn parse(text: &str) -> Result<Vec<Entry>, ParseError> {
    let mut section = String::new();
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ParseError::new(line, "unterminated section header"))?
                .trim();
            if name.is_empty() || !name.chars().all(is_key_char) {
                return Err(ParseError::new(
                    line,
                    format!("invalid section name `{name}`"),
                ));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ParseError::new(line, "expected `key = value`"))?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(is_key_char) {
            return Err(ParseError::new(line, format!("invalid key `{key}`")));
        }
        out.push(Entry {
            line,
            section: section.clone(),
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

fn is_key_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')
}

/// Floats formatted so that parsing the text restores the exact bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}
