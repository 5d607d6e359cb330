//! Layered parameters: command-line flags, then a `key=value` file, then
//! built-in defaults.
//!
//! Every resolved value is recorded twice: as JSON for the manifest and as
//! a `--flag value` pair so a replay can pin the full configuration on the
//! command line.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct Params {
    file: BTreeMap<String, String>,
    used: Vec<String>,
    values: Map<String, Value>,
    flags: Vec<String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses `key = value` lines. Blank lines and lines starting with `#`
/// are skipped.
pub fn parse_config(text: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key=value", i + 1))?;
        let k = normalize(k);
        if k.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            bail!("config line {}: duplicate key {k}", i + 1);
        }
    }
    Ok(out)
}

impl Params {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Params { file, ..Params::default() }
    }

    pub fn from_file(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Params::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Ok(Params::new(parse_config(&text)?))
    }

    fn lookup(&mut self, key: &str) -> Option<String> {
        let v = self.file.get(key).cloned();
        if v.is_some() {
            self.used.push(key.to_string());
        }
        v
    }

    fn record<T: Serialize>(&mut self, key: &str, value: &T, text: String) -> anyhow::Result<()> {
        self.values.insert(key.to_string(), serde_json::to_value(value)?);
        self.flags.push(format!("--{}", key.replace('_', "-")));
        self.flags.push(text);
        Ok(())
    }

    pub fn get<T>(&mut self, key: &str, cli: Option<T>, default: T) -> anyhow::Result<T>
    where
        T: FromStr + Display + Serialize,
        T::Err: Display,
    {
        let value = match (cli, self.lookup(key)) {
            (Some(v), _) => v,
            (None, Some(s)) => s.parse().map_err(|e| anyhow!("config key {key}: {e}"))?,
            (None, None) => default,
        };
        self.record(key, &value, value.to_string())?;
        Ok(value)
    }

    /// Comma-separated lists.
    pub fn get_list<T>(&mut self, key: &str, cli: Option<Vec<T>>, default: Vec<T>) -> anyhow::Result<Vec<T>>
    where
        T: FromStr + Display + Serialize,
        T::Err: Display,
    {
        let value = match (cli, self.lookup(key)) {
            (Some(v), _) => v,
            (None, Some(s)) => {
                s.split(',').map(|x| x.trim().parse().map_err(|e| anyhow!("config key {key}: {e}"))).collect::<anyhow::Result<Vec<T>>>()?
            }
            (None, None) => default,
        };
        if value.is_empty() {
            bail!("{key} needs at least one value");
        }
        let text = value.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        self.record(key, &value, text)?;
        Ok(value)
    }

    /// Fails on config keys no parameter asked for.
    pub fn finish(&self) -> anyhow::Result<()> {
        let unknown: Vec<&String> = self.file.keys().filter(|k| !self.used.contains(k)).collect();
        if !unknown.is_empty() {
            bail!("unknown config keys for this command: {}", unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "));
        }
        Ok(())
    }

    pub fn values(&self) -> &Map<String, Value> {
        &self.values
    }

    pub fn flags(&self) -> &[String] {
        &self.flags
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_is_cli_then_file_then_default() {
        let file = parse_config("# comment\nn = 8\np=0.4\nns = 1, 2,4\n").unwrap();
        let mut p = Params::new(file);
        assert_eq!(p.get("n", Some(16u32), 4).unwrap(), 16);
        assert_eq!(p.get("p", None, 0.5f64).unwrap(), 0.4);
        assert_eq!(p.get("reps", None, 100u64).unwrap(), 100);
        assert_eq!(p.get_list::<u32>("ns", None, vec![3]).unwrap(), vec![1, 2, 4]);
        p.finish().unwrap();
        assert_eq!(p.flags(), ["--n", "16", "--p", "0.4", "--reps", "100", "--ns", "1,2,4"]);
        assert_eq!(p.values()["p"], serde_json::json!(0.4));
    }

    #[test]
    fn bad_files_and_unknown_keys_are_errors() {
        assert!(parse_config("novalue").is_err());
        assert!(parse_config("a=1\na=2").is_err());
        let mut p = Params::new(parse_config("eta-reps=3\nbogus=1").unwrap());
        assert_eq!(p.get("eta_reps", None, 0u64).unwrap(), 3);
        assert!(p.finish().unwrap_err().to_string().contains("bogus"));
        let mut q = Params::new(parse_config("p=abc").unwrap());
        assert!(q.get("p", None, 0.5f64).is_err());
    }
}
