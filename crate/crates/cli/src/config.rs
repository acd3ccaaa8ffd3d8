//! `key = value` run configuration files.
//!
//! One setting per line; blank lines and lines starting with `#` are
//! ignored. Keys are the long flag names (`n-from`, `out-dir`, ...), with
//! `_` accepted for `-`. Unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Keys a config file may set.
pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "format",
    "start-index",
    "window",
    "n-from",
    "n-to",
    "bins",
    "smooth",
    "prominence",
    "tolerance",
    "out-dir",
    "seed",
    "threads",
    "count",
    "reference",
    "max-unmatched",
    "ks-max",
    "max-x",
    "bin-width",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed settings with the line each came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ConfigError { line, message };
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got {body:?}")))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(err(format!("unknown key {key:?}")));
            }
            if value.is_empty() {
                return Err(err(format!("empty value for {key:?}")));
            }
            if entries
                .insert(key.clone(), (line, value.to_string()))
                .is_some()
            {
                return Err(err(format!("duplicate key {key:?}")));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Typed value of `key`, if present.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e| ConfigError {
                line: *line,
                message: format!("{key}: {e}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_settings() {
        let c = ConfigFile::parse("# run\n\nn-from = 40\nn_to=105\nout-dir = out dir\n").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.get::<usize>("n-from").unwrap(), Some(40));
        assert_eq!(c.get::<usize>("n-to").unwrap(), Some(105));
        assert_eq!(c.raw("out-dir"), Some("out dir"));
        assert_eq!(c.get::<f64>("tolerance").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        let cases = [
            ("colour=blue\n", 1),
            ("bins=10\nbins=20\n", 2),
            ("\nwindow\n", 2),
            ("seed=\n", 1),
        ];
        for (text, line) in cases {
            assert_eq!(ConfigFile::parse(text).unwrap_err().line, line, "{text:?}");
        }
    }

    #[test]
    fn typed_errors_carry_line() {
        let c = ConfigFile::parse("\nbins=many\n").unwrap();
        let e = c.get::<usize>("bins").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.starts_with("bins:"));
    }
}
