//! Plain-text `key = value` configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Command-line flags take precedence over file values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

/// Every setting the commands understand. `None` means "use the default".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub seed: Option<u64>,
    pub nodes: Option<usize>,
    pub tol: Option<f64>,
    pub parallelism: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iterations: Option<usize>,
    pub output: Option<String>,
    pub json: Option<bool>,
    pub family: Option<String>,
    pub estimated: Option<String>,
    pub quantity: Option<String>,
    pub grid_points: Option<usize>,
    pub probe_gammas: Option<Vec<f64>>,
    pub probe_phis: Option<Vec<f64>>,
    pub gammas: Option<Vec<f64>>,
    pub fixed: Option<Vec<f64>>,
    pub gamma: Option<f64>,
    pub phi: Option<f64>,
    pub mode: Option<String>,
}

pub const KEYS: &[&str] = &[
    "seed",
    "nodes",
    "tol",
    "parallelism",
    "restarts",
    "max_iterations",
    "output",
    "json",
    "family",
    "estimated",
    "quantity",
    "grid_points",
    "probe_gammas",
    "probe_phis",
    "gammas",
    "fixed",
    "gamma",
    "phi",
    "mode",
];

fn parse_scalar<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::InvalidArgs(format!("config key `{key}`: cannot parse `{raw}`")))
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_real(key, s))
        .collect()
}

/// Reals, also accepting `pi` multiples such as `pi/8` or `3*pi/4`.
pub fn parse_real(key: &str, raw: &str) -> Result<f64, CliError> {
    let s = raw.trim().to_ascii_lowercase();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let err = || CliError::InvalidArgs(format!("`{key}`: cannot parse `{raw}` as a real number"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().to_string(), d.trim().parse::<f64>().map_err(|_| err())?),
        None => (s.clone(), 1.0),
    };
    let coef = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(c) => c.trim_end_matches('*').trim().parse::<f64>().map_err(|_| err())?,
        None => return Err(err()),
    };
    Ok(coef * std::f64::consts::PI / den)
}

fn parse_bool(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(CliError::InvalidArgs(format!(
            "config key `{key}`: expected a boolean, got `{other}`"
        ))),
    }
}

impl Settings {
    pub fn parse_text(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::InvalidArgs(format!("config line {}: expected key = value", lineno + 1)))?;
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::InvalidArgs(format!(
                    "config line {}: unknown key `{k}`",
                    lineno + 1
                )));
            }
            map.insert(k, v.trim().to_string());
        }
        let mut s = Settings::default();
        for (k, v) in &map {
            match k.as_str() {
                "seed" => s.seed = Some(parse_scalar(k, v)?),
                "nodes" => s.nodes = Some(parse_scalar(k, v)?),
                "tol" => s.tol = Some(parse_scalar(k, v)?),
                "parallelism" => s.parallelism = Some(parse_scalar(k, v)?),
                "restarts" => s.restarts = Some(parse_scalar(k, v)?),
                "max_iterations" => s.max_iterations = Some(parse_scalar(k, v)?),
                "output" => s.output = Some(v.clone()),
                "json" => s.json = Some(parse_bool(k, v)?),
                "family" => s.family = Some(v.clone()),
                "estimated" => s.estimated = Some(v.clone()),
                "quantity" => s.quantity = Some(v.clone()),
                "grid_points" => s.grid_points = Some(parse_scalar(k, v)?),
                "probe_gammas" => s.probe_gammas = Some(parse_list(k, v)?),
                "probe_phis" => s.probe_phis = Some(parse_list(k, v)?),
                "gammas" => s.gammas = Some(parse_list(k, v)?),
                "fixed" => s.fixed = Some(parse_list(k, v)?),
                "gamma" => s.gamma = Some(parse_real(k, v)?),
                "phi" => s.phi = Some(parse_real(k, v)?),
                "mode" => s.mode = Some(v.clone()),
                _ => unreachable!("keys are checked above"),
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::InvalidArgs(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_text(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            seed,
            nodes,
            tol,
            parallelism,
            restarts,
            max_iterations,
            output,
            json,
            family,
            estimated,
            quantity,
            grid_points,
            probe_gammas,
            probe_phis,
            gammas,
            fixed,
            gamma,
            phi,
            mode
        )
    }
}
