//! Optional key=value config file, merged under the command-line flags:
//! a flag always wins over the file, the file wins over built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct FileConfig {
    map: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| format!("config line {} is not key=value", lineno + 1))?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(FileConfig { map })
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("config value for {key} is invalid: {raw}")),
        }
    }

    /// Flag value if given, else config value, else the default.
    pub fn resolve<T: FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, String> {
        Ok(flag.or(self.parse(key)?).unwrap_or(default))
    }

    /// Flag value if given, else config value, else an error naming the key.
    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, String> {
        flag.or(self.parse(key)?).ok_or_else(|| format!("missing required parameter: {key}"))
    }

    /// Repeatable flag: flag occurrences win wholesale; a config value is
    /// parsed as a comma-separated list.
    pub fn resolve_list<T: FromStr + Clone>(
        &self,
        flag: &[T],
        key: &str,
        default: &[T],
    ) -> Result<Vec<T>, String> {
        if !flag.is_empty() {
            return Ok(flag.to_vec());
        }
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(raw) => raw
                .split(',')
                .map(|part| {
                    part.trim()
                        .parse::<T>()
                        .map_err(|_| format!("config value for {key} is invalid: {raw}"))
                })
                .collect(),
        }
    }
}

/// `WxH` grid dimension syntax, e.g. `16x16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridDims {
    pub offsets: usize,
    pub intensities: usize,
}

impl FromStr for GridDims {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (w, h) = s.split_once(['x', 'X']).ok_or("grid must look like 16x16")?;
        let offsets = w.parse().map_err(|_| "grid width must be a number")?;
        let intensities = h.parse().map_err(|_| "grid height must be a number")?;
        if offsets == 0 || intensities == 0 {
            return Err("grid dimensions must be positive".into());
        }
        Ok(GridDims { offsets, intensities })
    }
}
