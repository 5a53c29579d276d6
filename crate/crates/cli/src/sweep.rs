//! Two-parameter sweeps of the core entangling family over the triangular
//! region of the fixed components.

use std::f64::consts::FRAC_PI_2;

use isoest::cooperative::{cooperative_min_from_moments, derive_seed};
use isoest::estimation::{
    channel_costs_from_moments, default_gamma_grid, default_phi_grid, joint_moments, personik_solve, probe_grid,
    MomentOperators,
};
use isoest::matlin::Subsystem;
use isoest::quantum::{core_entangling_uniform, CoreComponent, CoreUnitaryTarget, ProbeState};
use isoest::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::common::{fmt_num, Common};
use crate::config::Settings;
use crate::error::CliError;

pub const DEFAULT_GRID_POINTS: usize = 25;
/// Cooperative restarts per probe unless set explicitly. Every probe of a
/// delta sweep needs a cooperative solve, and extra restarts of the
/// descent methods land on the same minimum.
pub const SWEEP_RESTARTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Privacy,
    Delta,
}

impl std::str::FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "privacy" => Ok(Quantity::Privacy),
            "delta" => Ok(Quantity::Delta),
            other => Err(CliError::InvalidArgs(format!(
                "unknown quantity `{other}` (privacy | delta)"
            ))),
        }
    }
}

pub fn parse_component(s: &str) -> Result<CoreComponent, CliError> {
    match s {
        "s_x" | "sx" | "x" => Ok(CoreComponent::X),
        "s_y" | "sy" | "y" => Ok(CoreComponent::Y),
        "s_z" | "sz" | "z" => Ok(CoreComponent::Z),
        other => Err(CliError::InvalidArgs(format!(
            "unknown component `{other}` (s_x | s_y | s_z)"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub estimated: CoreComponent,
    pub quantity: Quantity,
    pub grid_points: usize,
    pub probe_gammas: Vec<f64>,
    pub probe_phis: Vec<f64>,
    pub common: Common,
}

impl SweepSpec {
    pub fn new(estimated: CoreComponent, quantity: Quantity, common: Common) -> Self {
        Self {
            estimated,
            quantity,
            grid_points: DEFAULT_GRID_POINTS,
            probe_gammas: default_gamma_grid(),
            probe_phis: default_phi_grid(),
            common,
        }
    }

    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let family = s.family.as_deref().unwrap_or("core");
        if family != "core" {
            return Err(CliError::InvalidArgs(format!(
                "sweeps run over two fixed parameters and need the core family, got `{family}`"
            )));
        }
        let estimated = parse_component(
            s.estimated
                .as_deref()
                .ok_or_else(|| CliError::InvalidArgs("sweep needs --estimated".into()))?,
        )?;
        let quantity = s
            .quantity
            .as_deref()
            .ok_or_else(|| CliError::InvalidArgs("sweep needs --quantity".into()))?
            .parse()?;
        let mut common = Common::from_settings(s)?;
        if s.restarts.is_none() {
            common.restarts = SWEEP_RESTARTS;
        }
        let mut spec = SweepSpec::new(estimated, quantity, common);
        if let Some(n) = s.grid_points {
            spec.grid_points = n;
        }
        if let Some(g) = &s.probe_gammas {
            spec.probe_gammas = g.clone();
        }
        if let Some(p) = &s.probe_phis {
            spec.probe_phis = p.clone();
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid_points < 2 {
            return Err(CliError::InvalidArgs("grid_points must be at least 2".into()));
        }
        if self.probe_gammas.is_empty() || self.probe_phis.is_empty() {
            return Err(CliError::InvalidArgs("probe grids must be nonempty".into()));
        }
        probe_grid(&self.probe_gammas, &self.probe_phis)?;
        Ok(())
    }

    /// The `φ` values actually used. For `s_z` the grid collapses to `{0}`,
    /// since the phase only shifts the estimated angle.
    pub fn effective_phis(&self) -> Vec<f64> {
        if self.estimated == CoreComponent::Z {
            vec![0.0]
        } else {
            self.probe_phis.clone()
        }
    }

    pub fn probes(&self) -> Result<Vec<ProbeState<f64>>, CliError> {
        Ok(probe_grid(&self.probe_gammas, &self.effective_phis())?)
    }

    pub fn axis_names(&self) -> [&'static str; 2] {
        let [a, b] = self.estimated.fixed_components();
        [a.name(), b.name()]
    }
}

/// Axis values `k·(π/2)/(n−1)`, `k = 0..n`.
pub fn axis_values(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                FRAC_PI_2
            } else {
                FRAC_PI_2 * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Grid points `(axis1, axis2)` with `axis2 ≤ axis1`, ordered by `(i, j)`.
pub fn triangular_points(n: usize) -> Vec<(f64, f64)> {
    let v = axis_values(n);
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            out.push((v[i], v[j]));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: f64,
    pub best_gamma: f64,
    pub best_phi: f64,
    #[serde(rename = "cB_min")]
    pub cb_min: f64,
    /// `C̄_F` at the best probe (privacy) or `min C̄_BF` (delta).
    pub other: f64,
    pub value: f64,
    pub skipped: bool,
}

impl SweepRow {
    fn skipped(axis1: f64, axis2: f64) -> Self {
        Self {
            axis1,
            axis2,
            best_gamma: f64::NAN,
            best_phi: f64::NAN,
            cb_min: f64::NAN,
            other: f64::NAN,
            value: f64::NAN,
            skipped: true,
        }
    }
}

/// Evaluates one grid point. `index` selects the solver seed stream.
pub fn evaluate_point(spec: &SweepSpec, index: usize, axis1: f64, axis2: f64) -> Result<SweepRow, CliError> {
    let target = match CoreUnitaryTarget::new(spec.estimated, [axis1, axis2]) {
        Ok(t) => t,
        Err(Error::EmptyInterval { .. }) => return Ok(SweepRow::skipped(axis1, axis2)),
        Err(e) => return Err(e.into()),
    };
    let family = core_entangling_uniform(target, spec.common.nodes)?;
    let probes = spec.probes()?;
    let moments = probes
        .iter()
        .map(|p| joint_moments(&family, p))
        .collect::<Result<Vec<_>, _>>()?;
    let dims = family.dims();
    match spec.quantity {
        Quantity::Privacy => {
            let mut best: Option<(usize, f64, f64)> = None;
            for (k, m) in moments.iter().enumerate() {
                let c = channel_costs_from_moments(m, dims)?;
                let diff = c.f.cost - c.b.cost;
                if best.is_none_or(|(_, b, f)| diff > f - b) {
                    best = Some((k, c.b.cost, c.f.cost));
                }
            }
            let (k, cb, cf) = best.expect("probe grid is nonempty");
            Ok(SweepRow {
                axis1,
                axis2,
                best_gamma: probes[k].gamma,
                best_phi: probes[k].phi,
                cb_min: cb,
                other: cf,
                value: (cf - cb).max(0.0),
                skipped: false,
            })
        }
        Quantity::Delta => {
            let seed = derive_seed(spec.common.seed, index as u64);
            let cb_min = moments
                .iter()
                .map(|m| Ok(personik_solve(&m.marginal(dims, Subsystem::B)?)?.cost))
                .collect::<Result<Vec<f64>, CliError>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            let (k, cbf) = min_cooperative(&moments, dims, spec, seed)?;
            Ok(SweepRow {
                axis1,
                axis2,
                best_gamma: probes[k].gamma,
                best_phi: probes[k].phi,
                cb_min,
                other: cbf,
                value: cb_min - cbf,
                skipped: false,
            })
        }
    }
}

/// `min` over probes of the cooperative cost. The unrestricted joint minimum
/// bounds the cooperative cost from below, so probes are visited in order of
/// that bound and the scan stops once the bound reaches the best value found.
fn min_cooperative(
    moments: &[MomentOperators<f64>],
    dims: isoest::BipartiteDims,
    spec: &SweepSpec,
    seed: u64,
) -> Result<(usize, f64), CliError> {
    let bounds = moments
        .iter()
        .map(|m| Ok(personik_solve(m)?.cost))
        .collect::<Result<Vec<f64>, CliError>>()?;
    let mut order: Vec<usize> = (0..moments.len()).collect();
    order.sort_by(|&a, &b| bounds[a].total_cmp(&bounds[b]).then(a.cmp(&b)));
    let mut best = (usize::MAX, f64::INFINITY);
    for k in order {
        if bounds[k] >= best.1 {
            break;
        }
        let cfg = spec.common.coop_config(derive_seed(seed, k as u64));
        let pair = cooperative_min_from_moments(&moments[k], dims, &cfg)?;
        if pair.cost < best.1 {
            best = (k, pair.cost);
        }
    }
    if best.0 == usize::MAX {
        return Err(CliError::Core(Error::SolversFailed(
            "no finite cooperative cost on the probe grid".into(),
        )));
    }
    Ok(best)
}

/// All rows in grid order. The result does not depend on `parallelism`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    spec.validate()?;
    let points = triangular_points(spec.grid_points);
    let pool = spec.common.pool()?;
    pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(k, &(a1, a2))| evaluate_point(spec, k, a1, a2))
            .collect()
    })
}

pub fn csv_header(quantity: Quantity) -> &'static str {
    match quantity {
        Quantity::Privacy => "axis1,axis2,best_gamma,best_phi,cB_min,cF_min,value,skip_flag",
        Quantity::Delta => "axis1,axis2,best_gamma,best_phi,cB_min,cBF_min,value,skip_flag",
    }
}

pub fn to_csv(quantity: Quantity, rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 200);
    out.push_str(csv_header(quantity));
    out.push('\n');
    for r in rows {
        let fields = [
            fmt_num(r.axis1),
            fmt_num(r.axis2),
            fmt_num(r.best_gamma),
            fmt_num(r.best_phi),
            fmt_num(r.cb_min),
            fmt_num(r.other),
            fmt_num(r.value),
            u8::from(r.skipped).to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
