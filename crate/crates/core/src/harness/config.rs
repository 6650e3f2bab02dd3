//! `key = value` run configuration, merged with command-line overrides.
//!
//! Files are flat: one `key = value` per line, `#` starts a comment. Command
//! line flags use the same key names and are applied after the file.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::collection::Algorithm;
use crate::potential::PotentialMode;
use crate::sim::{ScenarioConfig, SourceEntry, SourceSelector};

use super::sweep::linspace;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    #[default]
    Desk,
    Paper,
}

impl Profile {
    fn scenario(self) -> ScenarioConfig {
        match self {
            Profile::Desk => ScenarioConfig::desk(),
            Profile::Paper => ScenarioConfig::paper(),
        }
    }

    fn seeds(self) -> u64 {
        match self {
            Profile::Desk => 10,
            Profile::Paper => 100,
        }
    }

    fn variabilities(self) -> Vec<f64> {
        match self {
            Profile::Desk => linspace(0.0, 1.0, 5),
            Profile::Paper => linspace(0.0, 1.0, 21),
        }
    }
}

/// Everything a `run` needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub scenario: ScenarioConfig,
    pub variabilities: Vec<f64>,
    pub seeds: Vec<u64>,
    pub window: (f64, f64),
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub const KEYS: &[&str] = &[
    "profile",
    "devices",
    "corridor",
    "radius",
    "period",
    "duration",
    "variability",
    "sweep",
    "seeds",
    "seed-list",
    "algorithms",
    "potential",
    "source-switch",
    "staleness",
    "max-speed",
    "teleport-rate",
    "jitter",
    "window",
    "out",
    "summary",
    "workers",
];

/// Reads `key = value` pairs from a config file.
pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pairs(&text, path)
}

fn parse_pairs(text: &str, path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            path: path.to_path_buf(),
            line: n + 1,
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| invalid(key, format!("cannot parse `{value}`")))
}

fn pair(key: &str, value: &str, sep: char) -> Result<(f64, f64), ConfigError> {
    let (a, b) = value
        .split_once(sep)
        .ok_or_else(|| invalid(key, format!("expected `a{sep}b`, got `{value}`")))?;
    Ok((num(key, a.trim())?, num(key, b.trim())?))
}

/// Builds settings from config-file pairs followed by override pairs; later
/// pairs win. The profile is resolved first, whichever source sets it.
pub fn resolve(
    file: &[(String, String)],
    overrides: &[(String, String)],
) -> Result<RunSettings, ConfigError> {
    let all: Vec<&(String, String)> = file.iter().chain(overrides).collect();
    for (k, _) in &all {
        if !KEYS.contains(&k.as_str()) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
    }
    let profile = match all.iter().rev().find(|(k, _)| k == "profile") {
        None => Profile::default(),
        Some((_, v)) => match v.as_str() {
            "desk" => Profile::Desk,
            "paper" => Profile::Paper,
            other => return Err(invalid("profile", format!("`{other}` is not desk | paper"))),
        },
    };

    let mut s = RunSettings {
        scenario: profile.scenario(),
        variabilities: profile.variabilities(),
        seeds: (1..=profile.seeds()).collect(),
        window: (0.0, f64::NAN),
        out: None,
        summary: None,
        workers: None,
    };
    let mut staleness: Option<f64> = None;
    let mut switch: Option<Option<f64>> = None;

    for (key, value) in all {
        let (k, v) = (key.as_str(), value.as_str());
        let c = &mut s.scenario;
        match k {
            "profile" => {}
            "devices" => c.device_count = num(k, v)?,
            "corridor" => (c.corridor_length, c.corridor_width) = pair(k, v, 'x')?,
            "radius" => c.radius = num(k, v)?,
            "period" => c.mean_period = num(k, v)?,
            "duration" => c.duration = num(k, v)?,
            "variability" => {
                let x: f64 = num(k, v)?;
                s.variabilities = vec![x];
            }
            "sweep" => {
                let parts: Vec<&str> = v.split(':').collect();
                let [a, b, n] = parts[..] else {
                    return Err(invalid(k, format!("expected `start:end:count`, got `{v}`")));
                };
                let n: usize = num(k, n)?;
                if n == 0 {
                    return Err(invalid(k, "count must be at least 1"));
                }
                s.variabilities = linspace(num(k, a)?, num(k, b)?, n);
            }
            "seeds" => {
                let n: u64 = num(k, v)?;
                s.seeds = (1..=n).collect();
            }
            "seed-list" => {
                s.seeds = v
                    .split(',')
                    .map(|x| num(k, x.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "algorithms" => {
                let mut algs: Vec<Algorithm> = v
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|e: String| invalid(k, e)))
                    .collect::<Result<_, _>>()?;
                algs.sort();
                algs.dedup();
                c.algorithms = algs;
            }
            "potential" => {
                c.potential_mode = v.parse::<PotentialMode>().map_err(|e| invalid(k, e))?
            }
            "source-switch" => {
                switch = Some(if v == "none" { None } else { Some(num(k, v)?) });
            }
            "staleness" => staleness = Some(num(k, v)?),
            "max-speed" => c.dynamics.max_speed = num(k, v)?,
            "teleport-rate" => c.dynamics.teleport_rate = num(k, v)?,
            "jitter" => c.dynamics.jitter = num(k, v)?,
            "window" => s.window = pair(k, v, ':')?,
            "out" => s.out = Some(PathBuf::from(v)),
            "summary" => s.summary = Some(PathBuf::from(v)),
            "workers" => {
                let w: usize = num(k, v)?;
                if w == 0 {
                    return Err(invalid(k, "must be at least 1"));
                }
                s.workers = Some(w);
            }
            _ => unreachable!("keys checked above"),
        }
    }

    let c = &mut s.scenario;
    c.staleness_bound = staleness.unwrap_or(2.5 * c.mean_period);
    match switch {
        Some(None) => {
            c.source_schedule = vec![SourceEntry {
                time: 0.0,
                selector: SourceSelector::Rightmost,
            }]
        }
        Some(Some(at)) => {
            if !(at > 0.0) {
                return Err(invalid("source-switch", "must be a positive time or `none`"));
            }
            c.source_schedule = ScenarioConfig::switch_schedule(at);
        }
        None => {}
    }
    if s.window.1.is_nan() {
        s.window.1 = c.duration;
    }
    if !(s.window.0 >= 0.0 && s.window.0 < s.window.1 && s.window.1 <= c.duration) {
        return Err(invalid("window", "must satisfy 0 <= start < end <= duration"));
    }
    if s.seeds.is_empty() {
        return Err(invalid("seeds", "at least one seed is required"));
    }
    for &x in &s.variabilities {
        let probe = ScenarioConfig {
            variability: x,
            ..c.clone()
        };
        probe.validate().map_err(|e| invalid(key_for(&e), e.to_string()))?;
    }
    Ok(s)
}

fn key_for(e: &crate::sim::ScenarioError) -> &'static str {
    use crate::sim::ScenarioError::*;
    match e {
        OutOfRange { field, .. } => match *field {
            "device_count" => "devices",
            "corridor_length" | "corridor_width" => "corridor",
            "radius" => "radius",
            "mean_period" => "period",
            "duration" => "duration",
            "variability" => "variability",
            "staleness_bound" => "staleness",
            "max_speed" => "max-speed",
            "teleport_rate" => "teleport-rate",
            "jitter" => "jitter",
            _ => "config",
        },
        BadSchedule | UnknownSource(_) => "source-switch",
        NoAlgorithms => "algorithms",
    }
}
