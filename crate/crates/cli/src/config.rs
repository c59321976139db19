//! Flat `key = value` configuration and the merged run settings.
//!
//! Blank lines and lines starting with `#` are ignored. Keys use the long
//! flag names: `dim`, `params`, `preset`, `mag`, `tol-imag`, `tol-param`,
//! `format`, `convention`, `p-max`, `rank-tol`, `pd-tol`, `steps`, `range`,
//! `axes`, `dims`, `seed`.

use std::collections::BTreeMap;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::args::{CommonArgs, Convention, Format};
use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

const KNOWN_KEYS: [&str; 16] = [
    "dim", "params", "preset", "mag", "tol-imag", "tol-param", "format", "convention", "p-max",
    "rank-tol", "pd-tol", "steps", "range", "axes", "dims", "seed",
];

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::input(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::input(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            entries.insert(key, v.trim().trim_matches('"').to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::input(format!("config key {key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim().parse::<T>().map_err(|_| {
                            CliError::input(format!("config key {key}: cannot parse {v:?}"))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn value_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| {
                T::from_str(v, true)
                    .map_err(|_| CliError::input(format!("config key {key}: unknown value {v:?}")))
            })
            .transpose()
    }
}

/// Every setting a command may read, after merging flags, config and defaults.
/// Serialized into run records.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub dim: Option<usize>,
    pub params: Option<Vec<f64>>,
    pub preset: Option<String>,
    pub mag: Option<f64>,
    pub tol_imag: f64,
    pub tol_param: f64,
    pub format: Format,
    pub convention: Convention,
    pub p_max: Option<f64>,
    pub rank_tol: f64,
    pub pd_tol: f64,
    pub steps: Option<usize>,
    pub range: Option<Vec<f64>>,
    pub axes: Option<Vec<usize>>,
    pub dims: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

impl Settings {
    /// Flags win over the config file, which wins over built-in defaults.
    pub fn resolve(flags: &CommonArgs, config: &ConfigFile) -> Result<Self, CliError> {
        Ok(Self {
            dim: flags.dim.or(config.parsed("dim")?),
            params: flags.params.clone().or(config.list("params")?),
            preset: flags.preset.clone().or(config.get("preset").map(str::to_string)),
            mag: flags.mag.or(config.parsed("mag")?),
            tol_imag: flags
                .tol_imag
                .or(config.parsed("tol-imag")?)
                .unwrap_or(qhlat_core::spectral::DEFAULT_REALITY_TOL),
            tol_param: flags
                .tol_param
                .or(config.parsed("tol-param")?)
                .unwrap_or(qhlat_core::spectral::DEFAULT_PARAM_TOL),
            format: flags.format.or(config.value_enum("format")?).unwrap_or(Format::Json),
            convention: flags
                .convention
                .or(config.value_enum("convention")?)
                .unwrap_or(Convention::LatticeSize),
            p_max: config.parsed("p-max")?,
            rank_tol: config.parsed("rank-tol")?.unwrap_or(1e-8),
            pd_tol: config
                .parsed("pd-tol")?
                .unwrap_or(qhlat_core::metric::DEFAULT_PD_TOL),
            steps: config.parsed("steps")?,
            range: config.list("range")?,
            axes: config.list("axes")?,
            dims: config.list("dims")?,
            seed: config.parsed("seed")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let c = ConfigFile::parse("# comment\n dim = 10\ntol_imag=1e-9\n\nconvention = param-count\n").unwrap();
        assert_eq!(c.get("dim"), Some("10"));
        assert_eq!(c.get("tol-imag"), Some("1e-9"));
        assert!(ConfigFile::parse("dim 10").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
    }

    #[test]
    fn flags_override_config() {
        let c = ConfigFile::parse("dim = 10\nmag = 0.2\nconvention = param-count").unwrap();
        let flags = CommonArgs {
            dim: Some(6),
            ..CommonArgs::default()
        };
        let s = Settings::resolve(&flags, &c).unwrap();
        assert_eq!(s.dim, Some(6));
        assert_eq!(s.mag, Some(0.2));
        assert_eq!(s.convention, Convention::ParamCount);
        assert_eq!(s.format, Format::Json);
    }
}
