//! Settings shared by every command.

use isoest::cooperative::{CoopConfig, SolverMethod};
use isoest::quadrature::DEFAULT_NODES;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::config::Settings;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct Common {
    pub seed: u64,
    pub nodes: usize,
    pub tol: f64,
    pub parallelism: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub json: bool,
    pub output: Option<String>,
}

impl Default for Common {
    fn default() -> Self {
        let coop = CoopConfig::<f64>::default();
        Self {
            seed: 0,
            nodes: DEFAULT_NODES,
            tol: coop.tolerance,
            parallelism: default_parallelism(),
            restarts: coop.restarts,
            max_iterations: coop.max_iterations,
            json: false,
            output: None,
        }
    }
}

pub fn default_parallelism() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Common {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let d = Common::default();
        let c = Common {
            seed: s.seed.unwrap_or(d.seed),
            nodes: s.nodes.unwrap_or(d.nodes),
            tol: s.tol.unwrap_or(d.tol),
            parallelism: s.parallelism.unwrap_or(d.parallelism),
            restarts: s.restarts.unwrap_or(d.restarts),
            max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
            json: s.json.unwrap_or(d.json),
            output: s.output.clone(),
        };
        if c.nodes == 0 {
            return Err(CliError::InvalidArgs("nodes must be at least 1".into()));
        }
        if !(c.tol > 0.0 && c.tol.is_finite()) {
            return Err(CliError::InvalidArgs("tol must be a positive number".into()));
        }
        if c.parallelism == 0 {
            return Err(CliError::InvalidArgs("parallelism must be at least 1".into()));
        }
        c.coop_config(0).validate()?;
        Ok(c)
    }

    pub fn coop_config(&self, seed: u64) -> CoopConfig<f64> {
        CoopConfig {
            tolerance: self.tol,
            max_iterations: self.max_iterations,
            restarts: self.restarts,
            seed,
            methods: SolverMethod::ALL.to_vec(),
        }
    }

    pub fn pool(&self) -> Result<ThreadPool, CliError> {
        ThreadPoolBuilder::new()
            .num_threads(self.parallelism)
            .build()
            .map_err(|e| CliError::InvalidArgs(format!("cannot start {} worker threads: {e}", self.parallelism)))
    }
}

/// 17 significant digits, `nan` for missing values.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

/// Writes `text` to the output path, or stdout when there is none.
pub fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, std::f64::consts::PI, 1e-300, -2.5e17, 0.0] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn rejects_bad_common_settings() {
        for s in [
            Settings {
                nodes: Some(0),
                ..Default::default()
            },
            Settings {
                tol: Some(-1.0),
                ..Default::default()
            },
            Settings {
                parallelism: Some(0),
                ..Default::default()
            },
            Settings {
                restarts: Some(0),
                ..Default::default()
            },
        ] {
            assert!(Common::from_settings(&s).is_err());
        }
    }
}
