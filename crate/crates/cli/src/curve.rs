//! Phase damping costs as a function of `γ`.

use isoest::cooperative::{cooperative_min_from_moments, derive_seed};
use isoest::estimation::{channel_costs_from_moments, joint_moments};
use isoest::quantum::{phase_damp_uniform, ProbeState};
use rayon::prelude::*;
use serde::Serialize;

use crate::common::{fmt_num, Common};
use crate::error::CliError;

pub const CSV_HEADER: &str = "gamma,cB_min,cF_min,cBF_min";

/// `γ ∈ {0, 0.01, …, 1}`.
pub fn default_gammas() -> Vec<f64> {
    (0..=100).map(|k| k as f64 / 100.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub gamma: f64,
    #[serde(rename = "cB_min")]
    pub cb_min: f64,
    #[serde(rename = "cF_min")]
    pub cf_min: f64,
    #[serde(rename = "cBF_min")]
    pub cbf_min: f64,
}

pub fn run_curve(gammas: &[f64], common: &Common) -> Result<Vec<CurveRow>, CliError> {
    if gammas.is_empty() {
        return Err(CliError::InvalidArgs("gamma grid is empty".into()));
    }
    let probes = gammas
        .iter()
        .map(|&g| ProbeState::new(g, 0.0))
        .collect::<Result<Vec<_>, _>>()?;
    let family = phase_damp_uniform::<f64>(common.nodes)?;
    let dims = family.dims();
    common.pool()?.install(|| {
        probes
            .par_iter()
            .enumerate()
            .map(|(k, p)| {
                let m = joint_moments(&family, p)?;
                let c = channel_costs_from_moments(&m, dims)?;
                let cfg = common.coop_config(derive_seed(common.seed, k as u64));
                let coop = cooperative_min_from_moments(&m, dims, &cfg)?;
                Ok(CurveRow {
                    gamma: p.gamma,
                    cb_min: c.b.cost,
                    cf_min: c.f.cost,
                    cbf_min: coop.cost,
                })
            })
            .collect()
    })
}

pub fn to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_num(r.gamma),
            fmt_num(r.cb_min),
            fmt_num(r.cf_min),
            fmt_num(r.cbf_min)
        ));
    }
    out
}
