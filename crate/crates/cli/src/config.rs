//! Config files overlaid by command-line flags.
//!
//! A file (TOML or JSON by extension) is parsed into a JSON value, flag
//! values are written over it at dotted keys, and the result is
//! deserialized into the command's config type. Unknown or mistyped fields
//! are reported by serde with the field name.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// Parsed file contents plus the directory relative paths resolve against.
pub struct ConfigSource {
    pub value: Value,
    pub base: Option<PathBuf>,
}

impl ConfigSource {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self {
                value: Value::Object(Map::new()),
                base: None,
            });
        };
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let value: Value = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)
                .with_context(|| format!("malformed JSON config {}", path.display()))?,
            _ => toml::from_str(&text)
                .with_context(|| format!("malformed TOML config {}", path.display()))?,
        };
        if !value.is_object() {
            bail!("config {} must be a table", path.display());
        }
        Ok(Self {
            value,
            base: path.parent().map(Path::to_path_buf),
        })
    }
}

/// Flag values to write over the file, keyed by dotted path.
#[derive(Default)]
pub struct Overrides {
    values: Vec<(&'static str, Value)>,
}

impl Overrides {
    pub fn set(&mut self, key: &'static str, v: Option<impl Into<Value>>) {
        if let Some(v) = v {
            self.values.push((key, v.into()));
        }
    }

    pub fn set_list<T: Into<Value>>(&mut self, key: &'static str, v: Option<Vec<T>>) {
        if let Some(v) = v {
            self.values
                .push((key, Value::Array(v.into_iter().map(Into::into).collect())));
        }
    }
}

pub fn resolve<T: DeserializeOwned>(mut source: Value, overrides: Overrides) -> Result<T> {
    for (key, v) in overrides.values {
        let mut cur = &mut source;
        let parts: Vec<&str> = key.split('.').collect();
        for p in &parts[..parts.len() - 1] {
            let map = cur
                .as_object_mut()
                .ok_or_else(|| anyhow!("config key {key} crosses a non-table value"))?;
            cur = map
                .entry(p.to_string())
                .or_insert_with(|| Value::Object(Map::new()));
        }
        let map = cur
            .as_object_mut()
            .ok_or_else(|| anyhow!("config key {key} crosses a non-table value"))?;
        map.insert(parts[parts.len() - 1].to_string(), v);
    }
    serde_json::from_value(source)
        .map_err(|e| spatperm::Error::InvalidInput(format!("config: {e}")).into())
}

/// Makes a relative path absolute against the config directory, then the working directory.
pub fn anchor(path: &Path, base: Option<&Path>) -> Result<PathBuf> {
    if path.is_absolute() {
        return Ok(path.to_path_buf());
    }
    let joined = match base {
        Some(b) => b.join(path),
        None => std::env::current_dir()?.join(path),
    };
    Ok(joined)
}

/// `start:stop:count` as `count` evenly spaced values, endpoints included.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("range must be start:stop:count, got {s:?}");
    };
    let a: f64 = a
        .trim()
        .parse()
        .with_context(|| format!("bad range start in {s:?}"))?;
    let b: f64 = b
        .trim()
        .parse()
        .with_context(|| format!("bad range stop in {s:?}"))?;
    let n: usize = n
        .trim()
        .parse()
        .with_context(|| format!("bad range count in {s:?}"))?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overlay_writes_nested_keys() {
        let mut o = Overrides::default();
        o.set("model.beta", Some(2.0));
        o.set("n", Some(3));
        o.set("skip", None::<f64>);
        let v: Value = resolve(json!({"model": {"dim": 3}, "n": 1}), o).unwrap();
        assert_eq!(v, json!({"model": {"dim": 3, "beta": 2.0}, "n": 3}));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1:-0.5:3").unwrap(), vec![-1.0, -0.75, -0.5]);
        assert_eq!(parse_range("2:5:1").unwrap(), vec![2.0]);
        assert!(parse_range("1:2").is_err());
    }
}
