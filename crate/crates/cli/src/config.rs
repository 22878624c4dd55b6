//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are skipped. Keys are the long flag names with
//! either `-` or `_` as separator; values are taken verbatim after trimming.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "problem",
    "alpha",
    "cstar",
    "n",
    "h",
    "domain",
    "refine",
    "tol",
    "solver",
    "out",
    "condition",
    "wall_time",
    "gamma",
    "x",
    "beta",
    "alpha_max",
    "dim",
    "points",
    "repeats",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", lineno + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("config line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs() {
        let c = Config::parse("# run\nproblem = ex3\n\nalpha-max= 6\ncstar = 0.5, 0.65\n").unwrap();
        assert_eq!(c.get("problem"), Some("ex3"));
        assert_eq!(c.get("alpha_max"), Some("6"));
        assert_eq!(c.get("cstar"), Some("0.5, 0.65"));
        assert_eq!(c.get("h"), None);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("n = 7\nn = 15").is_err());
        assert!(Config::parse("just words").is_err());
    }
}
