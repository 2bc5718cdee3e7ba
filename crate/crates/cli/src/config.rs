//! Parameter resolution: command-line flag, then config file, then
//! environment (seed only), then built-in default.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Environment variable consulted for the master seed when neither a flag
/// nor the config file sets it.
pub const SEED_ENV: &str = "CHAOS_CS_SEED";

/// Records a key given both on the command line and in the config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conflict {
    pub flag: Value,
    pub file: Value,
}

#[derive(Debug, Default)]
pub struct Resolver {
    file: Map<String, Value>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, Value>,
    conflicts: BTreeMap<String, Conflict>,
}

impl Resolver {
    /// Loads a flat JSON object. Nested values are rejected.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Resolver::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config file is not valid JSON: {e}")))?;
        let Value::Object(file) = value else {
            return Err(CliError::Usage("config file must hold a JSON object".into()));
        };
        for (key, v) in &file {
            let flat = match v {
                Value::Object(_) => false,
                Value::Array(items) => items.iter().all(|i| !i.is_object() && !i.is_array()),
                _ => true,
            };
            if !flat {
                return Err(CliError::Usage(format!(
                    "config key `{key}` must be a scalar or a list of scalars"
                )));
            }
        }
        Ok(Resolver {
            file,
            ..Resolver::default()
        })
    }

    /// Resolves `key`, converting both sources with `parse`.
    pub fn get_with<T, F>(&mut self, key: &str, flag: Option<T>, parse: F) -> Result<Option<T>, CliError>
    where
        T: Serialize + PartialEq,
        F: Fn(&Value) -> Result<T, String>,
    {
        self.used.insert(key.to_string());
        let from_file = match self.file.get(key) {
            Some(v) => Some(parse(v).map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))?),
            None => None,
        };
        let chosen = match (flag, from_file) {
            (Some(f), Some(file)) => {
                if f != file {
                    self.conflicts.insert(
                        key.to_string(),
                        Conflict {
                            flag: to_value(&f),
                            file: to_value(&file),
                        },
                    );
                }
                Some(f)
            }
            (f, file) => f.or(file),
        };
        if let Some(v) = &chosen {
            self.resolved.insert(key.to_string(), to_value(v));
        }
        Ok(chosen)
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: Serialize + DeserializeOwned + PartialEq,
    {
        self.get_with(key, flag, |v| {
            serde_json::from_value(v.clone()).map_err(|e| e.to_string())
        })
    }

    pub fn or<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: Serialize + DeserializeOwned + PartialEq,
    {
        match self.get(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.insert(key.to_string(), to_value(&default));
                Ok(default)
            }
        }
    }

    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: Serialize + DeserializeOwned + PartialEq,
    {
        self.get(key, flag)?.ok_or_else(|| missing(key))
    }

    /// Master seed with the environment as the lowest-precedence source
    /// before the default of 0.
    pub fn seed(&mut self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(seed) = self.get("seed", flag)? {
            return Ok(seed);
        }
        let seed = match std::env::var(SEED_ENV) {
            Ok(text) => text
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{text}`")))?,
            Err(_) => 0,
        };
        self.resolved.insert("seed".into(), Value::from(seed));
        Ok(seed)
    }

    /// Records a value that did not come from either source.
    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.resolved.insert(key.to_string(), to_value(&value));
    }

    /// Rejects config-file keys the command never asked for.
    pub fn check_unused(&self) -> Result<(), CliError> {
        match self.file.keys().find(|k| !self.used.contains(*k)) {
            Some(key) => Err(CliError::Usage(format!("unknown config key `{key}` for this command"))),
            None => Ok(()),
        }
    }

    pub fn resolved(&self) -> &BTreeMap<String, Value> {
        &self.resolved
    }

    pub fn conflicts(&self) -> &BTreeMap<String, Conflict> {
        &self.conflicts
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn missing(key: &str) -> CliError {
    CliError::Usage(format!("missing required parameter `{key}`"))
}

/// Expands `1:2:29` (start:step:stop, inclusive), `5:9` and comma-separated
/// mixtures such as `1,3,10:12` into a strictly increasing list.
pub fn parse_k_list(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(format!("empty entry in `{text}`"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{s}` is not a non-negative integer"))
        };
        let (start, step, stop) = match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                (v, 1, v)
            }
            [a, b] => (num(a)?, 1, num(b)?),
            [a, s, b] => (num(a)?, num(s)?, num(b)?),
            _ => return Err(format!("bad range `{item}`")),
        };
        if step == 0 {
            return Err(format!("range step must be positive in `{item}`"));
        }
        if stop < start {
            return Err(format!("range `{item}` is empty"));
        }
        out.extend((start..=stop).step_by(step));
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("k values in `{text}` must be strictly increasing"));
    }
    Ok(out)
}

/// A k list from the config file: a range string, a number or an array.
pub fn k_list_value(v: &Value) -> Result<Vec<usize>, String> {
    match v {
        Value::String(s) => parse_k_list(s),
        Value::Number(_) => serde_json::from_value::<usize>(v.clone())
            .map(|k| vec![k])
            .map_err(|e| e.to_string()),
        Value::Array(_) => {
            let ks: Vec<usize> = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
            parse_k_list(&ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","))
        }
        _ => Err("expected a range string, an integer or a list of integers".into()),
    }
}

/// A list of names from the config file: comma-separated string or array.
pub fn name_list_value(v: &Value) -> Result<Vec<String>, String> {
    match v {
        Value::String(s) => Ok(split_names(s)),
        Value::Array(_) => serde_json::from_value(v.clone()).map_err(|e| e.to_string()),
        _ => Err("expected a comma-separated string or a list of names".into()),
    }
}

pub fn split_names(text: &str) -> Vec<String> {
    text.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}
