//! `key = value` config files. Keys mirror long flag names with `-` or `_`;
//! a flag given on the command line always wins.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "base",
    "beta",
    "beta_grid",
    "cylinder",
    "format",
    "g",
    "k",
    "l",
    "m",
    "matrix",
    "n",
    "p",
    "primes",
    "samples",
    "seed",
    "signature",
    "terms",
];

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::input(format!("config line {}: expected key = value", i + 1))
            })?;
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::input(format!(
                    "config line {}: unknown key `{key}`",
                    i + 1
                )));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::input(format!(
                    "config line {}: duplicate key `{key}`",
                    i + 1
                )));
            }
        }
        Ok(Config { values })
    }

    /// Flag value if present, else the parsed config entry.
    pub fn pick<T>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: fn(&str) -> Result<T, String>,
    ) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => parse(raw)
                .map(Some)
                .map_err(|e| CliError::input(format!("config `{key}`: {e}"))),
        }
    }

    pub fn require<T>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: fn(&str) -> Result<T, String>,
    ) -> CliResult<T> {
        self.pick(flag, key, parse)?
            .ok_or_else(|| CliError::input(format!("missing --{}", key.replace('_', "-"))))
    }
}
