//! Plain `key = value` configuration files. Blank lines and lines starting
//! with `#` are ignored; `-` and `_` are interchangeable in keys. Values given
//! on the command line win over the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use bell_core::{Angle, ChshSettings};

use crate::angles;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_").to_ascii_lowercase()
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("config line {}: expected `key = value`", i + 1))
            })?;
            let v = v.trim().trim_matches('"');
            values.insert(normalize_key(k), v.to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize_key(key)).map(String::as_str)
    }

    /// `cli` if given, else the parsed config value, else `None`.
    pub fn pick<T>(&self, cli: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Input(format!("config key {key}: {e}")))
            })
            .transpose()
    }

    pub fn pick_or<T>(&self, cli: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(cli, key)?.unwrap_or(default))
    }

    pub fn angle(&self, cli: Option<&str>, key: &str, default: Angle) -> Result<Angle> {
        match cli.or_else(|| self.raw(key)) {
            Some(t) => angles::parse_angle(t),
            None => Ok(default),
        }
    }

    pub fn angle_list(&self, cli: Option<&str>, key: &str, default: &str) -> Result<Vec<Angle>> {
        angles::parse_angle_list(cli.or_else(|| self.raw(key)).unwrap_or(default))
    }

    /// `--angles`, falling back to the maximal-violation configuration.
    pub fn settings(&self, cli: Option<&str>) -> Result<ChshSettings> {
        match cli.or_else(|| self.raw("angles")) {
            Some(t) => angles::parse_settings(t),
            None => Ok(ChshSettings::maximal_violation()),
        }
    }
}
