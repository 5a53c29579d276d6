//! Single-point estimation.

use isoest::cooperative::cooperative_min_from_moments;
use isoest::estimation::{joint_moments, personik_solve, spectral_measurement};
use isoest::matlin::{ComplexMatrix, Subsystem};
use isoest::quantum::{
    core_entangling_uniform, phase_damp_uniform, CoreComponent, CoreUnitaryTarget, IsometryFamily, ProbeState,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::common::Common;
use crate::config::Settings;
use crate::error::CliError;
use crate::sweep::parse_component;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    B,
    F,
    #[serde(rename = "coop")]
    Coop,
}

impl std::str::FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "B" | "b" => Ok(Mode::B),
            "F" | "f" => Ok(Mode::F),
            "coop" | "BF" | "bf" => Ok(Mode::Coop),
            other => Err(CliError::InvalidArgs(format!("unknown mode `{other}` (B | F | coop)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyChoice {
    PhaseDamping,
    Core(CoreUnitaryTarget<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateSpec {
    pub family: FamilyChoice,
    pub probe: ProbeState<f64>,
    pub mode: Mode,
    pub common: Common,
}

impl EstimateSpec {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let family = match s.family.as_deref().unwrap_or("pdamp") {
            "pdamp" => FamilyChoice::PhaseDamping,
            "core" => {
                let c: CoreComponent = parse_component(
                    s.estimated
                        .as_deref()
                        .ok_or_else(|| CliError::InvalidArgs("core family needs --estimated".into()))?,
                )?;
                let fixed = s
                    .fixed
                    .as_deref()
                    .ok_or_else(|| CliError::InvalidArgs("core family needs --fixed a,b".into()))?;
                let [a, b] = <[f64; 2]>::try_from(fixed)
                    .map_err(|_| CliError::InvalidArgs("--fixed takes exactly two values".into()))?;
                FamilyChoice::Core(CoreUnitaryTarget::new(c, [a, b])?)
            }
            other => {
                return Err(CliError::InvalidArgs(format!(
                    "unknown family `{other}` (pdamp | core)"
                )))
            }
        };
        let probe = ProbeState::new(s.gamma.unwrap_or(0.5), s.phi.unwrap_or(0.0))?;
        let mode = s.mode.as_deref().unwrap_or("B").parse()?;
        Ok(Self {
            family,
            probe,
            mode,
            common: Common::from_settings(s)?,
        })
    }

    pub fn family(&self) -> Result<IsometryFamily<f64>, CliError> {
        Ok(match self.family {
            FamilyChoice::PhaseDamping => phase_damp_uniform(self.common.nodes)?,
            FamilyChoice::Core(t) => core_entangling_uniform(t, self.common.nodes)?,
        })
    }
}

fn matrix_json(m: &ComplexMatrix<f64>) -> Value {
    let rows = |im: bool| -> Vec<Vec<f64>> {
        (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| if im { m[(r, c)].im } else { m[(r, c)].re })
                    .collect()
            })
            .collect()
    };
    json!({ "re": rows(false), "im": rows(true) })
}

fn outcomes_json(m: &ComplexMatrix<f64>) -> Result<Value, CliError> {
    Ok(Value::Array(
        spectral_measurement(m)?
            .iter()
            .map(|o| json!({ "value": o.outcome, "projector": matrix_json(&o.projector) }))
            .collect(),
    ))
}

pub fn run_estimate(spec: &EstimateSpec) -> Result<Value, CliError> {
    let family = spec.family()?;
    let dims = family.dims();
    let m = joint_moments(&family, &spec.probe)?;
    let (lo, hi) = (family.prior().lower(), family.prior().upper());
    let mut out = json!({
        "family": family.label(),
        "gamma": spec.probe.gamma,
        "phi": spec.probe.phi,
        "mode": spec.mode,
        "interval": [lo, hi],
        "nodes": spec.common.nodes,
    });
    if let FamilyChoice::Core(t) = spec.family {
        out["estimated"] = json!(t.estimated.name());
        out["fixed"] = json!(t.fixed_values);
    }
    let body = match spec.mode {
        Mode::B | Mode::F => {
            let keep = if spec.mode == Mode::B {
                Subsystem::B
            } else {
                Subsystem::F
            };
            let sol = personik_solve(&m.marginal(dims, keep)?)?;
            json!({
                "cost": sol.cost,
                "estimator": matrix_json(&sol.estimator),
                "residual": sol.residual,
                "degenerate": sol.degenerate,
                "outcomes": outcomes_json(&sol.estimator)?,
            })
        }
        Mode::Coop => {
            let pair = cooperative_min_from_moments(&m, dims, &spec.common.coop_config(spec.common.seed))?;
            let r = &pair.report;
            json!({
                "cost": pair.cost,
                "s_b": matrix_json(&pair.s_b),
                "s_f": matrix_json(&pair.s_f),
                "outcomes_b": outcomes_json(&pair.s_b)?,
                "outcomes_f": outcomes_json(&pair.s_f)?,
                "residual_1a": r.residual_1a,
                "residual_1b": r.residual_1b,
                "method": r.method.name(),
                "converged": r.converged,
                "iterations": r.iterations,
                "restarts": r.restarts_used,
                "seed": r.seed,
                "method_gap": r.method_gap,
                "notes": r.notes,
            })
        }
    };
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use isoest::closedform;
    use std::f64::consts::PI;

    fn spec(gamma: f64, mode: &str) -> EstimateSpec {
        EstimateSpec::from_settings(&Settings {
            gamma: Some(gamma),
            mode: Some(mode.into()),
            restarts: Some(4),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn pdamp_half_b() {
        let v = run_estimate(&spec(0.5, "B")).unwrap();
        assert!((v["cost"].as_f64().unwrap() - closedform::cb_min(0.5).unwrap()).abs() < 1e-12);
        let diag = (16.0 - 8.0 * PI + PI.powi(3)) / (4.0 * (PI * PI - 4.0));
        assert!((v["estimator"]["re"][0][0].as_f64().unwrap() - diag).abs() < 1e-10);
        assert_eq!(v["outcomes"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn pdamp_zero_coop_and_b() {
        let v = run_estimate(&spec(0.0, "coop")).unwrap();
        assert!((v["cost"].as_f64().unwrap() - closedform::coop_min_at_zero::<f64>()).abs() < 1e-9);
        let v = run_estimate(&spec(0.0, "B")).unwrap();
        assert!((v["cost"].as_f64().unwrap() - PI * PI / 48.0).abs() < 1e-12);
        assert_eq!(v["degenerate"], json!(true));
    }

    #[test]
    fn core_point() {
        let s = EstimateSpec::from_settings(&Settings {
            family: Some("core".into()),
            estimated: Some("s_y".into()),
            fixed: Some(vec![1.2, 0.2]),
            mode: Some("F".into()),
            ..Default::default()
        })
        .unwrap();
        let v = run_estimate(&s).unwrap();
        assert!(v["cost"].as_f64().unwrap() > 0.0);
        assert_eq!(v["estimated"], json!("s_y"));
    }

    #[test]
    fn bad_settings() {
        for s in [
            Settings {
                family: Some("bogus".into()),
                ..Default::default()
            },
            Settings {
                family: Some("core".into()),
                ..Default::default()
            },
            Settings {
                family: Some("core".into()),
                estimated: Some("s_x".into()),
                fixed: Some(vec![0.1]),
                ..Default::default()
            },
            Settings {
                family: Some("core".into()),
                estimated: Some("s_x".into()),
                fixed: Some(vec![0.1, 0.5]),
                ..Default::default()
            },
            Settings {
                gamma: Some(2.0),
                ..Default::default()
            },
            Settings {
                mode: Some("Q".into()),
                ..Default::default()
            },
        ] {
            assert!(EstimateSpec::from_settings(&s).is_err(), "{s:?}");
        }
    }
}
