use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Flat `key = value` configuration. Lines starting with `#` are comments;
/// later entries override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            cfg.set_pair(line).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies one `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got '{pair}'")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Config(format!("empty key in '{pair}'")));
        }
        self.entries.insert(k.to_string(), v.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Typed, consuming view of a [`RawConfig`]. Every lookup records its key
/// and resolved value; [`Reader::finish`] rejects keys nobody asked for and
/// returns the resolved configuration for the report echo.
pub struct Reader<'a> {
    raw: &'a RawConfig,
    used: RefCell<BTreeSet<String>>,
    echo: RefCell<BTreeMap<String, String>>,
}

impl<'a> Reader<'a> {
    pub fn new(raw: &'a RawConfig) -> Self {
        Self { raw, used: RefCell::default(), echo: RefCell::default() }
    }

    fn lookup(&self, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().insert(key.to_string());
        self.raw.get(key)
    }

    fn record(&self, key: &str, value: String) {
        self.echo.borrow_mut().insert(key.to_string(), value);
    }

    pub fn parse_or<T: FromStr + ToString>(&self, key: &str, default: T) -> Result<T> {
        let value = match self.lookup(key) {
            Some(text) => text.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{text}'")))?,
            None => default,
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    pub fn optional<T: FromStr + ToString>(&self, key: &str) -> Result<Option<T>> {
        match self.lookup(key) {
            Some(text) => {
                let v: T = text.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{text}'")))?;
                self.record(key, v.to_string());
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    /// Comma-separated list.
    pub fn list_or<T: FromStr + ToString + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>> {
        let values = match self.lookup(key) {
            Some(text) => text
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{s}'"))))
                .collect::<Result<Vec<T>>>()?,
            None => default.to_vec(),
        };
        self.record(key, values.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
        Ok(values)
    }

    /// Marks a key as understood without reading it (keys that only
    /// matter for other shapes or modes).
    pub fn allow(&self, key: &str) {
        self.used.borrow_mut().insert(key.to_string());
    }

    pub fn finish(self) -> Result<BTreeMap<String, String>> {
        let used = self.used.into_inner();
        let unknown: Vec<&str> = self.raw.entries.keys().filter(|k| !used.contains(*k)).map(String::as_str).collect();
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown key(s): {}", unknown.join(", "))));
        }
        Ok(self.echo.into_inner())
    }
}

pub fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}
