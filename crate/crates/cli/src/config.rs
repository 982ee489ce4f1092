//! Flat `key = value` experiment configuration files.
//!
//! Lines are `key = value`; `#` starts a comment. Keys are looked up with
//! typed getters that either fall back to a default or report the missing
//! key by name. Every key that was read is echoed into the run manifest so
//! outputs stay reproducible from config + master seed alone.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub struct FlatConfig {
    values: BTreeMap<String, String>,
    origin: PathBuf,
    /// key -> value actually used (after defaulting), for the manifest
    resolved: RefCell<BTreeMap<String, String>>,
}

impl FlatConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("{}:{}: expected `key = value`", path.display(), ln + 1);
            };
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(FlatConfig {
            values,
            origin: path.to_path_buf(),
            resolved: RefCell::new(BTreeMap::new()),
        })
    }

    fn note(&self, key: &str, value: impl Display) {
        self.resolved
            .borrow_mut()
            .insert(key.to_string(), value.to_string());
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        let v = self
            .values
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string());
        self.note(key, &v);
        v
    }

    pub fn require_str(&self, key: &str) -> Result<String> {
        let v = self
            .values
            .get(key)
            .cloned()
            .with_context(|| format!("{}: missing required key `{key}`", self.origin.display()))?;
        self.note(key, &v);
        Ok(v)
    }

    pub fn get_opt_str(&self, key: &str) -> Option<String> {
        let v = self.values.get(key).cloned();
        if let Some(ref v) = v {
            self.note(key, v);
        }
        v
    }

    /// Paths are resolved relative to the config file's directory.
    pub fn resolve_path(&self, value: &str) -> PathBuf {
        let p = PathBuf::from(value);
        if p.is_absolute() {
            p
        } else {
            self.origin
                .parent()
                .map(|d| d.join(&p))
                .unwrap_or(p)
        }
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf> {
        Ok(self.resolve_path(&self.require_str(key)?))
    }

    pub fn get_opt_path(&self, key: &str) -> Option<PathBuf> {
        self.get_opt_str(key).map(|v| self.resolve_path(&v))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, raw: &str) -> Result<T> {
        raw.parse::<T>().map_err(|_| {
            anyhow::anyhow!(
                "{}: key `{key}` has unparsable value {raw:?}",
                self.origin.display()
            )
        })
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.values.get(key) {
            Some(raw) => {
                let v = self.parse(key, raw)?;
                self.note(key, v);
                Ok(v)
            }
            None => {
                self.note(key, default);
                Ok(default)
            }
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.values.get(key) {
            Some(raw) => {
                let v = self.parse(key, raw)?;
                self.note(key, v);
                Ok(v)
            }
            None => {
                self.note(key, default);
                Ok(default)
            }
        }
    }

    pub fn require_usize(&self, key: &str) -> Result<usize> {
        let raw = self.require_str(key)?;
        self.parse(key, &raw)
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.values.get(key) {
            Some(raw) => {
                let v: f64 = self.parse(key, raw)?;
                self.note(key, v);
                Ok(v)
            }
            None => {
                self.note(key, default);
                Ok(default)
            }
        }
    }

    /// Snapshot of every key consulted so far with the values in effect.
    pub fn resolved_entries(&self) -> Vec<(String, String)> {
        self.resolved
            .borrow()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_cfg(text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("uvt_cfg_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.cfg");
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn parses_defaults_and_overrides() {
        let path = write_cfg("a = 3\n# comment\npath = rel.csv\n");
        let cfg = FlatConfig::load(&path).unwrap();
        assert_eq!(cfg.get_u64("a", 9).unwrap(), 3);
        assert_eq!(cfg.get_u64("b", 9).unwrap(), 9);
        assert!(cfg.require_str("missing").is_err());
        let p = cfg.resolve_path("rel.csv");
        assert!(p.ends_with("rel.csv"));
        assert!(p.is_absolute());
        let resolved = cfg.resolved_entries();
        assert!(resolved.iter().any(|(k, v)| k == "a" && v == "3"));
        assert!(resolved.iter().any(|(k, v)| k == "b" && v == "9"));
    }

    #[test]
    fn rejects_malformed_lines() {
        let path = write_cfg("not a kv line\n");
        assert!(FlatConfig::load(&path).is_err());
    }
}
