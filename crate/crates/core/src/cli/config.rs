//! Plain `key = value` parameter files.
//!
//! Blank lines and lines starting with `#` are ignored. Recognised keys are
//! `potential` (`well` or `barrier`), `v0`, `u0`, `a`, `two_mu_over_hbar2`,
//! `nmax`, `emin`, `emax`, `points` and `format`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

const KEYS: [&str; 10] = [
    "potential",
    "v0",
    "u0",
    "a",
    "two_mu_over_hbar2",
    "nmax",
    "emin",
    "emax",
    "points",
    "format",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let key = k.trim().to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<V: std::str::FromStr>(&self, key: &str) -> Result<Option<V>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidParameter(format!("config key `{key}`: cannot parse `{s}`"))),
        }
    }
}
