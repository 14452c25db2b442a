//! Flat dotted-key configuration files: one `key = value` per line, `#`
//! comments, strict unknown-key rejection, deterministic canonical form.

use fracwave::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct Config {
    entries: BTreeMap<String, String>,
    /// Keys actually consumed by the command; anything left over is an error.
    allowed: Vec<&'static str>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected 'key = value', got '{raw}'",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!("duplicate key '{key}'")));
            }
        }
        Ok(Self { entries, allowed: Vec::new() })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config '{}': {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Declare the full key set this command understands.
    pub fn allow(&mut self, keys: &[&'static str]) {
        self.allowed.extend_from_slice(keys);
    }

    /// Reject any key outside the allowed set.
    pub fn finish(&self) -> Result<()> {
        for key in self.entries.keys() {
            if !self.allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown key '{key}' (valid keys: {})",
                    self.allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &'static str) -> Result<&str> {
        self.raw(key).ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
    }

    pub fn get_f64(&self, key: &'static str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("key '{key}': '{v}' is not a number")))
            })
            .transpose()
    }

    pub fn require_f64(&self, key: &'static str) -> Result<f64> {
        self.require(key)?;
        Ok(self.get_f64(key)?.unwrap())
    }

    pub fn f64_or(&self, key: &'static str, default: f64) -> Result<f64> {
        Ok(self.get_f64(key)?.unwrap_or(default))
    }

    pub fn get_usize(&self, key: &'static str) -> Result<Option<usize>> {
        self.raw(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Config(format!("key '{key}': '{v}' is not a non-negative integer")))
            })
            .transpose()
    }

    pub fn require_usize(&self, key: &'static str) -> Result<usize> {
        self.require(key)?;
        Ok(self.get_usize(key)?.unwrap())
    }

    pub fn usize_or(&self, key: &'static str, default: usize) -> Result<usize> {
        Ok(self.get_usize(key)?.unwrap_or(default))
    }

    pub fn str_or<'a>(&'a self, key: &'static str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn bool_or(&self, key: &'static str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("on") | Some("true") => Ok(true),
            Some("off") | Some("false") => Ok(false),
            Some(v) => Err(Error::Config(format!("key '{key}': '{v}' is not on/off"))),
        }
    }

    /// Comma-separated list of reals.
    pub fn require_f64_list(&self, key: &'static str) -> Result<Vec<f64>> {
        let raw = self.require(key)?;
        raw.split(',')
            .map(|item| {
                item.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("key '{key}': '{item}' is not a number")))
            })
            .collect()
    }

    /// Canonical `key = value` text in sorted order; the config digest is
    /// taken over this form so formatting differences do not matter.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let mut c = Config::parse("a.b = 1\n# comment\nc = x # trailing\n").unwrap();
        assert_eq!(c.raw("a.b"), Some("1"));
        assert_eq!(c.raw("c"), Some("x"));
        c.allow(&["a.b"]);
        assert!(c.finish().is_err(), "key 'c' must be rejected");
        c.allow(&["c"]);
        assert!(c.finish().is_ok());
    }

    #[test]
    fn reports_missing_keys_by_name() {
        let c = Config::parse("").unwrap();
        let err = c.require("epsilons").unwrap_err();
        assert!(err.to_string().contains("epsilons"), "{err}");
    }

    #[test]
    fn rejects_malformed_lines_and_duplicates() {
        assert!(Config::parse("just words\n").is_err());
        assert!(Config::parse("a = 1\na = 2\n").is_err());
        let c = Config::parse("x = abc\n").unwrap();
        assert!(c.get_f64("x").is_err());
    }

    #[test]
    fn canonical_form_is_sorted_and_stable() {
        let a = Config::parse("b = 2\na = 1\n").unwrap();
        let b = Config::parse("a = 1\n# note\nb =   2\n").unwrap();
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical(), "a = 1\nb = 2\n");
    }
}
