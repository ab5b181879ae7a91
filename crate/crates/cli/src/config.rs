//! Line-oriented scenario configuration.
//!
//! ```text
//! # comment
//! scenario.name = lwi-efficiency-sweep
//! laser.hot_temperature = 6000     # trailing comments are allowed
//! laser.phase = pi
//! ```
//!
//! Every non-blank, non-comment line is `section.key = value`. Keys are
//! unique. Numbers are plain floats or multiples and fractions of `pi`
//! (`pi`, `2pi`, `pi/2`, `3*pi/4`).

use std::f64::consts::PI;
use std::fmt;

/// Position and message of a configuration error. Line and column are
/// 1-based; `line == 0` means the error concerns the file as a whole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn whole_file(message: impl Into<String>) -> Self {
        Self::at(0, 0, message)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(
                f,
                "line {}, column {}: {}",
                self.line, self.column, self.message
            )
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    pub key_column: usize,
    pub value_column: usize,
}

impl Entry {
    pub fn value_error(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.line, self.value_column, message)
    }

    pub fn key_error(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.line, self.key_column, message)
    }

    pub fn number(&self) -> Result<f64, ParseError> {
        parse_number(&self.value)
            .ok_or_else(|| self.value_error(format!("`{}` is not a number", self.value)))
    }

    pub fn count(&self) -> Result<usize, ParseError> {
        self.value.parse().map_err(|_| {
            self.value_error(format!("`{}` is not a non-negative integer", self.value))
        })
    }

    pub fn list(&self) -> Vec<&str> {
        self.value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect()
    }
}

/// The parsed entries of a config file, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    entries: Vec<Entry>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut entries: Vec<Entry> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                let col = first_non_space(content) + 1;
                return Err(ParseError::at(line, col, "expected `section.key = value`"));
            };
            let key_part = &content[..eq];
            let value_part = &content[eq + 1..];
            let key = key_part.trim();
            let key_column = first_non_space(key_part) + 1;
            if key.is_empty() {
                return Err(ParseError::at(line, eq + 1, "missing key before `=`"));
            }
            if !is_valid_key(key) {
                return Err(ParseError::at(
                    line,
                    key_column,
                    format!("malformed key `{key}`; expected `section.key`"),
                ));
            }
            let value = value_part.trim();
            let value_column = eq + 2 + first_non_space(value_part);
            if value.is_empty() {
                return Err(ParseError::at(
                    line,
                    value_column,
                    format!("`{key}` has no value"),
                ));
            }
            if let Some(prev) = entries.iter().find(|e| e.key == key) {
                return Err(ParseError::at(
                    line,
                    key_column,
                    format!("duplicate key `{key}` (first set on line {})", prev.line),
                ));
            }
            entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
                key_column,
                value_column,
            });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

fn first_non_space(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn is_valid_key(key: &str) -> bool {
    let mut parts = key.split('.');
    let ok = |p: Option<&str>| {
        p.is_some_and(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
    };
    ok(parts.next()) && ok(parts.next()) && parts.next().is_none()
}

/// A float, or `[coef[*]]pi[/den]`.
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (numerator, denominator) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (text, 1.0),
    };
    let coefficient = numerator
        .strip_suffix("pi")?
        .trim()
        .trim_end_matches('*')
        .trim();
    let coefficient = match coefficient {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let v = coefficient * PI / denominator;
    v.is_finite().then_some(v)
}
