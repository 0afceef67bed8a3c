//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, CliResult};
use crate::output::Format;

/// The only environment variable consulted; it relocates relative outputs.
pub const OUT_DIR_ENV: &str = "MAGIC_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "results";

pub const KEYS: &[&str] = &[
    "L", "ell", "jy", "jz", "h", "eps", "tol", "method", "measure", "out", "format", "workers",
    "kind", "theta", "a", "solver", "h_max",
];

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    experiment: String,
    values: BTreeMap<String, String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        check_key(key)?;
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn check_key(key: &str) -> CliResult<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(config_err(format!("unknown key `{key}`")))
    }
}

/// Splits a list on commas; an item `start:stop:step` expands to the
/// inclusive arithmetic range.
fn expand_list<T>(text: &str, key: &str) -> CliResult<Vec<T>>
where
    T: FromStr + Copy + Into<f64> + FromF64,
{
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        let parse = |s: &str| {
            s.parse::<T>()
                .map_err(|_| config_err(format!("{key}: cannot parse `{s}`")))
        };
        match parts.as_slice() {
            [single] => out.push(parse(single)?),
            [start, stop, step] => {
                let (a, b, s): (f64, f64, f64) = (
                    parse(start)?.into(),
                    parse(stop)?.into(),
                    parse(step)?.into(),
                );
                if s.is_nan() || s <= 0.0 || b < a {
                    return Err(config_err(format!("{key}: bad range `{item}`")));
                }
                let count = ((b - a) / s + 1e-9).floor() as usize;
                for i in 0..=count {
                    out.push(T::from_f64(a + i as f64 * s));
                }
            }
            _ => return Err(config_err(format!("{key}: bad item `{item}`"))),
        }
    }
    Ok(out)
}

pub trait FromF64 {
    fn from_f64(x: f64) -> Self;
}

impl FromF64 for f64 {
    fn from_f64(x: f64) -> Self {
        // ranges like 0:0.9:0.1 should print as 0.3, not 0.30000000000000004
        (x * 1e12).round() / 1e12
    }
}

impl FromF64 for u32 {
    fn from_f64(x: f64) -> Self {
        x.round() as u32
    }
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            values: BTreeMap::new(),
        }
    }

    /// File values first, then `overrides` on top.
    pub fn load(
        experiment: &str,
        file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> CliResult<Self> {
        let mut cfg = Self::new(experiment);
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            cfg.values = parse_config_text(&text)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        check_key(key)?;
        self.values
            .insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn with(mut self, key: &str, value: &str) -> CliResult<Self> {
        self.set(key, value)?;
        Ok(self)
    }

    pub fn experiment(&self) -> &str {
        &self.experiment
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Chain lengths; every entry must be odd and at least 3.
    pub fn sizes(&self, default: &[usize]) -> CliResult<Vec<usize>> {
        let sizes: Vec<usize> = match self.raw("L") {
            None => default.to_vec(),
            Some(text) => expand_list::<u32>(text, "L")?
                .into_iter()
                .map(|x| x as usize)
                .collect(),
        };
        if sizes.is_empty() {
            return Err(config_err("L: empty list"));
        }
        if let Some(bad) = sizes.iter().find(|&&l| l < 3 || l % 2 == 0) {
            return Err(config_err(format!(
                "L: {bad} is not an odd length of at least 3"
            )));
        }
        Ok(sizes)
    }

    /// May be empty.
    pub fn grid(&self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(text) => expand_list::<f64>(text, key),
        }
    }

    pub fn float(&self, key: &str, default: f64) -> CliResult<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(text) => text
                .parse()
                .map_err(|_| config_err(format!("{key}: cannot parse `{text}`"))),
        }
    }

    pub fn opt_float(&self, key: &str) -> CliResult<Option<f64>> {
        self.raw(key).map(|_| self.float(key, 0.0)).transpose()
    }

    pub fn positive(&self, key: &str, default: f64) -> CliResult<f64> {
        let x = self.float(key, default)?;
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(config_err(format!("{key}: must be positive, got {x}")))
        }
    }

    /// Momentum indices, or `None` for `all`.
    pub fn ells(&self, default: &[i64]) -> CliResult<Option<Vec<i64>>> {
        match self.raw("ell") {
            None => Ok(Some(default.to_vec())),
            Some("all") => Ok(None),
            Some(text) => text
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<i64>()
                        .map_err(|_| config_err(format!("ell: cannot parse `{s}`")))
                })
                .collect::<CliResult<Vec<_>>>()
                .map(Some),
        }
    }

    pub fn opt_usize(&self, key: &str) -> CliResult<Option<usize>> {
        self.raw(key)
            .map(|text| {
                text.parse()
                    .map_err(|_| config_err(format!("{key}: cannot parse `{text}`")))
            })
            .transpose()
    }

    pub fn names(&self, key: &str, default: &[&str]) -> Vec<String> {
        match self.raw(key) {
            None => default.iter().map(|s| s.to_string()).collect(),
            Some(text) => text
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        }
    }

    pub fn name(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    pub fn format(&self) -> CliResult<Format> {
        self.raw("format").unwrap_or("csv").parse()
    }

    /// 0 means one worker per available core.
    pub fn workers(&self) -> CliResult<usize> {
        Ok(self.opt_usize("workers")?.unwrap_or(0))
    }

    /// `None` means standard output.
    pub fn output_path(&self) -> CliResult<Option<PathBuf>> {
        self.output_path_with(std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
    }

    pub fn output_path_with(&self, env_dir: Option<PathBuf>) -> CliResult<Option<PathBuf>> {
        let ext = self.format()?.extension();
        match self.raw("out") {
            Some("-") => Ok(None),
            Some(p) => {
                let p = PathBuf::from(p);
                Ok(Some(match env_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p,
                }))
            }
            None => {
                let dir = env_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
                Ok(Some(dir.join(format!("{}.{ext}", self.experiment))))
            }
        }
    }
}
