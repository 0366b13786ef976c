//! Flat `key=value` config files and flag/config/default layering.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

/// Keys accepted in config files, identical to the long flag names.
pub const KEYS: &[&str] = &[
    "input",
    "fixture",
    "delimiter",
    "missing-token",
    "drop-column",
    "discretize",
    "compress",
    "aggregate",
    "drop-items-above",
    "minsup",
    "pop-size",
    "mutation-rate",
    "crossover-rate",
    "min-generations",
    "stall-generations",
    "max-generations",
    "seed",
    "max-rule-items",
    "specialize-generalize-probability",
    "generalize-operator",
    "archive-capacity",
    "comprehensibility-variant",
    "execution",
    "format",
    "top-k",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, Vec<String>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    /// Blank lines and `#` comments are ignored; repeated keys accumulate.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(format!("line {}: unknown key `{key}`", n + 1));
            }
            values.entry(key.to_string()).or_default().push(value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// Last value given for `key`, parsed.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key).and_then(|v| v.last()) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Failure::usage(format!("config key {key}: {e}"))),
            None => Ok(None),
        }
    }

    pub fn all(&self, key: &str) -> Vec<String> {
        self.values.get(key).cloned().unwrap_or_default()
    }
}

/// Flag value if given, else the config value, else `None`.
pub fn layer<T: FromStr>(flag: Option<T>, config: &ConfigFile, key: &str) -> Result<Option<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => config.get(key),
    }
}

/// Repeatable settings: flags replace the config list when any are given.
pub fn layer_list(flags: &[String], config: &ConfigFile, key: &str) -> Vec<String> {
    if flags.is_empty() {
        config.all(key)
    } else {
        flags.to_vec()
    }
}
