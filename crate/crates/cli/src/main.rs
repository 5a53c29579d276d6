use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isoest_cli::config::parse_real;
use isoest_cli::curve::{default_gammas, run_curve};
use isoest_cli::error::{CliError, EXIT_VALIDATION_FAILED};
use isoest_cli::estimate::{run_estimate, EstimateSpec};
use isoest_cli::sweep::{run_sweep, SweepSpec};
use isoest_cli::validate::run_validation;
use isoest_cli::{common, curve, sweep, Common, Settings};

#[derive(Parser, Debug)]
#[command(
    name = "isoest",
    version,
    about = "Bayesian estimation of isometry parameters: validation, curves and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Top-level RNG seed; per-point seeds are derived from it
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Gauss-Legendre nodes for the prior average
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Solver tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    /// Starting points per cooperative solver
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Iteration cap per cooperative solver run
    #[arg(long, global = true)]
    max_iterations: Option<usize>,
    /// key = value file; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write results here instead of stdout
    #[arg(long, global = true)]
    output: Option<String>,
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the numerics against closed forms and independent constructions
    Validate,
    /// Phase damping costs versus gamma as CSV
    Curve {
        /// Comma-separated gamma values (default 0, 0.01, ..., 1)
        #[arg(long)]
        gammas: Option<String>,
    },
    /// Privacy or cooperative advantage over the triangular grid of fixed parameters
    Sweep {
        #[arg(long)]
        family: Option<String>,
        /// s_x | s_y | s_z
        #[arg(long)]
        estimated: Option<String>,
        /// privacy | delta
        #[arg(long)]
        quantity: Option<String>,
        #[arg(long)]
        grid_points: Option<usize>,
        /// Comma-separated probe populations
        #[arg(long)]
        probe_gammas: Option<String>,
        /// Comma-separated probe phases (accepts pi/8 style values)
        #[arg(long)]
        probe_phis: Option<String>,
    },
    /// Optimal estimator at one point as JSON
    Estimate {
        /// pdamp | core
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        estimated: Option<String>,
        /// The two fixed components in x, y, z order, comma separated
        #[arg(long)]
        fixed: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        /// B | F | coop
        #[arg(long)]
        mode: Option<String>,
    },
}

fn list(key: &str, raw: &Option<String>) -> Result<Option<Vec<f64>>, CliError> {
    raw.as_deref()
        .map(|r| r.split(',').map(|v| parse_real(key, v)).collect())
        .transpose()
}

fn real(key: &str, raw: &Option<String>) -> Result<Option<f64>, CliError> {
    raw.as_deref().map(|r| parse_real(key, r)).transpose()
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let g = &cli.global;
    let mut flags = Settings {
        seed: g.seed,
        nodes: g.nodes,
        tol: g.tol,
        parallelism: g.parallelism,
        restarts: g.restarts,
        max_iterations: g.max_iterations,
        output: g.output.clone(),
        json: g.json.then_some(true),
        ..Default::default()
    };
    match &cli.command {
        Command::Validate => {}
        Command::Curve { gammas } => flags.gammas = list("gammas", gammas)?,
        Command::Sweep {
            family,
            estimated,
            quantity,
            grid_points,
            probe_gammas,
            probe_phis,
        } => {
            flags.family = family.clone();
            flags.estimated = estimated.clone();
            flags.quantity = quantity.clone();
            flags.grid_points = *grid_points;
            flags.probe_gammas = list("probe_gammas", probe_gammas)?;
            flags.probe_phis = list("probe_phis", probe_phis)?;
        }
        Command::Estimate {
            family,
            estimated,
            fixed,
            gamma,
            phi,
            mode,
        } => {
            flags.family = family.clone();
            flags.estimated = estimated.clone();
            flags.fixed = list("fixed", fixed)?;
            flags.gamma = real("gamma", gamma)?;
            flags.phi = real("phi", phi)?;
            flags.mode = mode.clone();
        }
    }
    Ok(match &g.config {
        Some(path) => Settings::from_file(path)?.overridden_by(flags),
        None => flags,
    })
}

fn json_text<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::InvalidArgs(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let s = settings(cli)?;
    match &cli.command {
        Command::Validate => {
            let common = Common::from_settings(&s)?;
            let report = run_validation(&common)?;
            let text = if common.json {
                json_text(&report)?
            } else {
                report.table()
            };
            common::emit(&common, &text)?;
            if !report.passed {
                return Ok(ExitCode::from(EXIT_VALIDATION_FAILED as u8));
            }
        }
        Command::Curve { .. } => {
            let common = Common::from_settings(&s)?;
            let gammas = s.gammas.clone().unwrap_or_else(default_gammas);
            let rows = run_curve(&gammas, &common)?;
            let text = if common.json {
                json_text(&rows)?
            } else {
                curve::to_csv(&rows)
            };
            common::emit(&common, &text)?;
        }
        Command::Sweep { .. } => {
            let spec = SweepSpec::from_settings(&s)?;
            let rows = run_sweep(&spec)?;
            let text = if spec.common.json {
                json_text(&rows)?
            } else {
                sweep::to_csv(spec.quantity, &rows)
            };
            common::emit(&spec.common, &text)?;
        }
        Command::Estimate { .. } => {
            let spec = EstimateSpec::from_settings(&s)?;
            let value = run_estimate(&spec)?;
            common::emit(&spec.common, &json_text(&value)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
