//! Resolved experiment configuration: defaults, then the config file, then
//! command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::CliError;
use crate::experiments::Experiment;
use crate::params::Param;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT: &str = "out";

/// Keys accepted in a config file besides the experiment parameters.
pub const RESERVED_KEYS: [&str; 3] = ["experiment", "seed", "output_path"];

/// A flat JSON config file.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    pub path: PathBuf,
    pub entries: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
        match v {
            Value::Object(entries) => Ok(Self {
                path: path.to_path_buf(),
                entries,
            }),
            _ => Err(CliError::Config(format!("config {} must be a JSON object", path.display()))),
        }
    }

    pub fn experiment(&self) -> Result<Option<String>, CliError> {
        match self.entries.get("experiment") {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(CliError::Config(format!("'experiment' must be a string, got {v}"))),
        }
    }
}

/// Values supplied on the command line, before parsing.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<String>,
    pub out: Option<String>,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub experiment: String,
    pub seed: u64,
    pub output_path: PathBuf,
    values: Vec<(&'static str, Value)>,
}

fn parse_seed(v: &Value) -> Result<u64, CliError> {
    let bad = || CliError::Config(format!("seed must be a non-negative integer, got {v}"));
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| bad()),
        _ => v.as_u64().ok_or_else(bad),
    }
}

impl Config {
    pub fn resolve(exp: &Experiment, file: Option<&ConfigFile>, flags: &Overrides) -> Result<Self, CliError> {
        let empty = Map::new();
        let entries = file.map_or(&empty, |f| &f.entries);
        for key in entries.keys() {
            if !RESERVED_KEYS.contains(&key.as_str()) && !exp.params.iter().any(|p| p.name == key) {
                return Err(CliError::Config(format!(
                    "unknown key '{key}' for experiment '{}' (accepted: {})",
                    exp.name,
                    exp.params.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
                )));
            }
        }
        for key in flags.params.keys() {
            if !exp.params.iter().any(|p| p.name == key) {
                return Err(CliError::Config(format!("unknown parameter '{key}' for '{}'", exp.name)));
            }
        }

        let seed = match (&flags.seed, entries.get("seed")) {
            (Some(s), _) => parse_seed(&Value::String(s.clone()))?,
            (None, Some(v)) => parse_seed(v)?,
            (None, None) => DEFAULT_SEED,
        };
        let output_path = match (&flags.out, entries.get("output_path")) {
            (Some(s), _) => PathBuf::from(s),
            (None, Some(Value::String(s))) => PathBuf::from(s),
            (None, Some(v)) => return Err(CliError::Config(format!("output_path must be a string, got {v}"))),
            (None, None) => PathBuf::from(DEFAULT_OUT),
        };

        let mut values = Vec::with_capacity(exp.params.len());
        for p in exp.params {
            let parsed = if let Some(s) = flags.params.get(p.name) {
                p.kind.parse_str(s)
            } else if let Some(v) = entries.get(p.name) {
                p.kind.from_json(v)
            } else {
                p.kind.parse_str(p.default)
            };
            let v = parsed.map_err(|e| CliError::Config(format!("--{}: {e}", p.name)))?;
            values.push((p.name, v));
        }
        Ok(Self {
            experiment: exp.name.to_string(),
            seed,
            output_path,
            values,
        })
    }

    fn get(&self, name: &str) -> &Value {
        &self
            .values
            .iter()
            .find(|(n, _)| *n == name)
            .unwrap_or_else(|| panic!("parameter '{name}' is not in the schema"))
            .1
    }

    pub fn int(&self, name: &str) -> i64 {
        self.get(name).as_i64().expect("integer parameter")
    }

    /// A non-negative integer parameter.
    pub fn count(&self, name: &str) -> Result<usize, CliError> {
        let v = self.int(name);
        usize::try_from(v).map_err(|_| CliError::Config(format!("--{name} must be non-negative, got {v}")))
    }

    pub fn float(&self, name: &str) -> f64 {
        self.get(name).as_f64().expect("float parameter")
    }

    pub fn opt_float(&self, name: &str) -> Option<f64> {
        self.get(name).as_f64()
    }

    pub fn ints(&self, name: &str) -> Vec<i64> {
        self.get(name)
            .as_array()
            .expect("list parameter")
            .iter()
            .map(|v| v.as_i64().expect("integer entry"))
            .collect()
    }

    /// Integer list whose entries must be non-negative.
    pub fn counts(&self, name: &str) -> Result<Vec<usize>, CliError> {
        self.ints(name)
            .into_iter()
            .map(|v| usize::try_from(v).map_err(|_| CliError::Config(format!("--{name} entries must be non-negative, got {v}"))))
            .collect()
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        self.get(name)
            .as_array()
            .expect("list parameter")
            .iter()
            .map(|v| v.as_f64().expect("float entry"))
            .collect()
    }

    pub fn choice(&self, name: &str) -> &str {
        self.get(name).as_str().expect("choice parameter")
    }

    /// `(key, value)` pairs for `#` header lines, in schema order.
    pub fn header(&self) -> Vec<(String, String)> {
        let mut h = vec![
            ("experiment".to_string(), self.experiment.clone()),
            ("seed".to_string(), self.seed.to_string()),
            ("output_path".to_string(), self.output_path.display().to_string()),
        ];
        h.extend(self.values.iter().map(|(n, v)| (n.to_string(), v.to_string())));
        h
    }

    /// The resolved configuration as a flat JSON object; it is a valid
    /// config file for the same run.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("experiment".into(), Value::from(self.experiment.clone()));
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("output_path".into(), Value::from(self.output_path.display().to_string()));
        for (n, v) in &self.values {
            m.insert(n.to_string(), v.clone());
        }
        Value::Object(m)
    }
}

/// Help text line for one parameter.
pub fn describe(p: &Param) -> String {
    format!("{} [default: {}]", p.help, p.default)
}
