//! Run settings, resolved with precedence flags > `KLEIN_*` environment
//! variables > config file > built-in defaults.
//!
//! The config file holds `key = value` lines; blank lines and lines starting
//! with `#` are ignored. Recognized keys: `cache_dir`, `workers`,
//! `budget_mb`, `max_a_rank`, `max_d_rank`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kleinhilb::lie_data::{DynkinType, Series};
use kleinhilb::zeta_series::Budget;

use crate::error::CliError;

pub const DEFAULT_MAX_A_RANK: usize = 30;
pub const DEFAULT_MAX_D_RANK: usize = 12;

const KEYS: [&str; 5] = [
    "cache_dir",
    "workers",
    "budget_mb",
    "max_a_rank",
    "max_d_rank",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub cache_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub budget_mb: Option<u64>,
    pub max_a_rank: Option<usize>,
    pub max_d_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub cache_dir: Option<PathBuf>,
    pub workers: usize,
    pub budget_mb: Option<u64>,
    pub max_a_rank: usize,
    pub max_d_rank: usize,
}

impl Settings {
    pub fn budget(&self) -> Budget {
        self.budget_mb
            .map(Budget::from_megabytes)
            .unwrap_or_default()
    }

    /// Parses a type name and applies the configured rank caps.
    pub fn dynkin_type(&self, name: &str) -> Result<DynkinType, CliError> {
        let t: DynkinType = name.trim().parse()?;
        let cap = match t.series() {
            Series::A => Some(self.max_a_rank),
            Series::D => Some(self.max_d_rank),
            Series::E => None,
        };
        if let Some(cap) = cap.filter(|&c| t.rank() > c) {
            return Err(CliError::Usage(format!(
                "{t} exceeds the configured rank cap {cap} for series {}",
                t.series()
            )));
        }
        Ok(t)
    }
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", i + 1))
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key {key:?}",
                i + 1
            )));
        }
        let value = value.trim().trim_matches('"');
        out.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
    parse_config(&text)
}

fn env_name(key: &str) -> String {
    format!("KLEIN_{}", key.to_uppercase())
}

fn layered<T: FromStr>(
    key: &str,
    flag: Option<T>,
    env: &dyn Fn(&str) -> Option<String>,
    file: &BTreeMap<String, String>,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    let (source, raw) = match env(&env_name(key)) {
        Some(v) => (env_name(key), v),
        None => match file.get(key) {
            Some(v) => (format!("config key {key}"), v.clone()),
            None => return Ok(None),
        },
    };
    raw.trim()
        .parse()
        .map(Some)
        .map_err(|_| CliError::Usage(format!("{source}: cannot parse {raw:?}")))
}

pub fn resolve(
    flags: &Overrides,
    env: &dyn Fn(&str) -> Option<String>,
    file: &BTreeMap<String, String>,
) -> Result<Settings, CliError> {
    let cache_dir = layered("cache_dir", flags.cache_dir.clone(), env, file)?
        .filter(|p: &PathBuf| !p.as_os_str().is_empty());
    let workers = layered("workers", flags.workers, env, file)?.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    if workers == 0 {
        return Err(CliError::Usage("worker count must be at least 1".into()));
    }
    Ok(Settings {
        cache_dir,
        workers,
        budget_mb: layered("budget_mb", flags.budget_mb, env, file)?,
        max_a_rank: layered("max_a_rank", flags.max_a_rank, env, file)?
            .unwrap_or(DEFAULT_MAX_A_RANK),
        max_d_rank: layered("max_d_rank", flags.max_d_rank, env, file)?
            .unwrap_or(DEFAULT_MAX_D_RANK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn parses_key_value_lines() {
        let f = parse_config("# comment\nworkers = 3\n\ncache_dir=\"/tmp/x\"\n").unwrap();
        assert_eq!(f["workers"], "3");
        assert_eq!(f["cache_dir"], "/tmp/x");
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("workers").is_err());
    }

    #[test]
    fn precedence_is_flag_env_file() {
        let file = parse_config("workers = 3\nbudget_mb = 10\nmax_a_rank = 5").unwrap();
        let env = |k: &str| (k == "KLEIN_WORKERS").then(|| "2".to_string());
        let s = resolve(&Overrides::default(), &env, &file).unwrap();
        assert_eq!((s.workers, s.budget_mb, s.max_a_rank), (2, Some(10), 5));
        let flags = Overrides {
            workers: Some(7),
            ..Overrides::default()
        };
        assert_eq!(resolve(&flags, &env, &file).unwrap().workers, 7);
        let s = resolve(&Overrides::default(), &no_env, &BTreeMap::new()).unwrap();
        assert_eq!((s.max_a_rank, s.max_d_rank, s.cache_dir), (30, 12, None));
    }

    #[test]
    fn rejects_bad_values() {
        let file = parse_config("workers = many").unwrap();
        assert!(resolve(&Overrides::default(), &no_env, &file).is_err());
        let flags = Overrides {
            workers: Some(0),
            ..Overrides::default()
        };
        assert!(resolve(&flags, &no_env, &BTreeMap::new()).is_err());
    }

    #[test]
    fn rank_caps() {
        let mut s = resolve(&Overrides::default(), &no_env, &BTreeMap::new()).unwrap();
        assert!(s.dynkin_type("A30").is_ok());
        assert!(s.dynkin_type("A31").is_err());
        assert!(s.dynkin_type("D13").is_err());
        assert!(s.dynkin_type("E9").is_err());
        s.max_a_rank = 3;
        assert!(s.dynkin_type("A4").is_err());
        assert!(s.dynkin_type("E8").is_ok());
    }
}
