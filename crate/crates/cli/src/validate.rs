//! Agreement of the numerical pipeline with closed forms and independent
//! constructions.

use std::f64::consts::FRAC_PI_2;

use isoest::closedform;
use isoest::cooperative::cooperative_min_from_moments;
use isoest::estimation::{channel_costs_from_moments, cost_of, haar_probe_sample, joint_moments, personik_solve};
use isoest::matlin::{partial_trace, BipartiteDims, Subsystem};
use isoest::quantum::{
    appendix, check_isometry, core_entangling_uniform, core_unitary, core_unitary_from_generator,
    embed_environment_ground, phase_damp_uniform, CoreComponent, CoreUnitaryTarget, IsometryFamily, ProbeState,
};
use serde::Serialize;

use crate::common::Common;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{}  {:<width$}  residual {:.3e}  tol {:.1e}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance,
            ));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter()
        .fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

fn gamma_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

fn pdamp_costs(f: &IsometryFamily<f64>, gamma: f64) -> Result<(f64, f64), CliError> {
    let m = joint_moments(f, &ProbeState::new(gamma, 0.0)?)?;
    let c = channel_costs_from_moments(&m, f.dims())?;
    Ok((c.b.cost, c.f.cost))
}

/// Runs every check with the quadrature order and solver settings of `common`.
pub fn run_validation(common: &Common) -> Result<ValidationReport, CliError> {
    let mut checks = Vec::new();
    let pdamp = phase_damp_uniform::<f64>(common.nodes)?;

    for g in gamma_grid(11) {
        let (cb, cf) = pdamp_costs(&pdamp, g)?;
        checks.push(Check::new(
            format!("pdamp cB_min closed form, gamma={g:.1}"),
            (cb - closedform::cb_min(g)?).abs(),
            1e-9,
        ));
        checks.push(Check::new(
            format!("pdamp cF_min closed form, gamma={g:.1}"),
            (cf - closedform::cf_min(g)?).abs(),
            1e-9,
        ));
        checks.push(Check::new(
            format!("pdamp privacy factored form, gamma={g:.1}"),
            ((cf - cb).max(0.0) - closedform::pe(g)?).abs(),
            1e-9,
        ));
    }

    let g0 = closedform::gamma0::<f64>();
    checks.push(Check::new(
        "gamma0 is a root of the privacy",
        closedform::pe_difference(g0)?.abs(),
        1e-9,
    ));
    let grid = gamma_grid(1001);
    let mut best = (0.0, f64::NEG_INFINITY);
    for &g in &grid {
        let (cb, cf) = pdamp_costs(&pdamp, g)?;
        if cf - cb > best.1 {
            best = (g, cf - cb);
        }
    }
    checks.push(Check::new(
        "numeric privacy argmax near gamma*",
        (best.0 - closedform::gamma_star::<f64>()).abs(),
        1e-3,
    ));

    for g in [0.3, 0.5, 0.77] {
        let m = joint_moments(&pdamp, &ProbeState::new(g, 0.0)?)?.marginal(BipartiteDims::QUBITS, Subsystem::B)?;
        let s = closedform::sb_opt(g)?;
        checks.push(Check::new(
            format!("optimal S_B cost, gamma={g}"),
            (cost_of(&s, &m)? - closedform::cb_min(g)?).abs(),
            1e-9,
        ));
        let numeric = personik_solve(&m)?.estimator;
        checks.push(Check::new(
            format!("optimal S_B matrix, gamma={g}"),
            numeric.max_abs_diff(&s),
            1e-8,
        ));
    }

    let m0 = joint_moments(&pdamp, &ProbeState::new(0.0, 0.0)?)?;
    let coop = cooperative_min_from_moments(&m0, pdamp.dims(), &common.coop_config(common.seed))?;
    checks.push(Check::new(
        "cooperative minimum at gamma=0",
        (coop.cost - closedform::coop_min_at_zero::<f64>()).abs(),
        1e-6,
    ));

    checks.push(Check::new("phase damping isometry", check_isometry(&pdamp, 33), 1e-12));
    for (c, fixed) in [
        (CoreComponent::X, [0.7, 0.2]),
        (CoreComponent::Y, [1.4, 0.3]),
        (CoreComponent::Z, [1.1, 0.9]),
    ] {
        let fam = core_entangling_uniform::<f64>(CoreUnitaryTarget::new(c, fixed)?, common.nodes)?;
        checks.push(Check::new(
            format!("core isometry, estimating {}", c.name()),
            check_isometry(&fam, 33),
            1e-12,
        ));
    }

    let (u_res, rho_res) = appendix_residuals()?;
    checks.push(Check::new("core unitary vs generator exponential", u_res, 1e-10));
    checks.push(Check::new("core outputs vs closed-form entries", rho_res, 1e-10));

    checks.push(Check::new(
        "quadrature convergence 48 vs 96 nodes",
        quadrature_gap(20, common.seed)?,
        1e-12,
    ));

    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { checks, passed })
}

/// Largest deviations of `U(s⃗)` from the exponential of its generator, and of
/// `ρ_B`, `ρ_F`, `ρ(s⃗)` from their closed forms, on a `5×5×5×3×3` grid.
pub fn appendix_residuals() -> Result<(f64, f64), CliError> {
    let axis: Vec<f64> = (0..5).map(|k| FRAC_PI_2 * k as f64 / 4.0).collect();
    let gammas = [0.0, 0.5, 1.0];
    let phis = [0.0, 2.0, 4.5];
    let dims = BipartiteDims::QUBITS;
    let mut u_res: f64 = 0.0;
    let mut rho_res: f64 = 0.0;
    for &sx in &axis {
        for &sy in &axis {
            for &sz in &axis {
                let s = [sx, sy, sz];
                let u = core_unitary(s);
                u_res = u_res.max(u.max_abs_diff(&core_unitary_from_generator(s)?));
                let v = embed_environment_ground(&u, 2, 2);
                for &g in &gammas {
                    for &phi in &phis {
                        let rho_a = ProbeState::new(g, phi)?.density();
                        let rho = rho_a.conjugate_by(&v);
                        let rb = partial_trace(&rho, dims, Subsystem::B)?;
                        let rf = partial_trace(&rho, dims, Subsystem::F)?;
                        rho_res = rho_res
                            .max(rho.max_abs_diff(&appendix::rho_joint(s, g, phi)))
                            .max(rb.max_abs_diff(&appendix::rho_b(s, g, phi)))
                            .max(rf.max_abs_diff(&appendix::rho_f(s, g, phi)));
                    }
                }
            }
        }
    }
    Ok((u_res, rho_res))
}

/// Largest Frobenius distance between 48- and 96-node moments over random
/// probes, on both families.
pub fn quadrature_gap(probes: usize, seed: u64) -> Result<f64, CliError> {
    let target = CoreUnitaryTarget::new(CoreComponent::X, [0.6, 0.3])?;
    let families = [
        (phase_damp_uniform::<f64>(48)?, phase_damp_uniform::<f64>(96)?),
        (
            core_entangling_uniform(target, 48)?,
            core_entangling_uniform(target, 96)?,
        ),
    ];
    let mut gap: f64 = 0.0;
    for p in haar_probe_sample::<f64>(probes, seed) {
        for (lo, hi) in &families {
            let a = joint_moments(lo, &p)?;
            let b = joint_moments(hi, &p)?;
            gap = gap
                .max((&a.w0 - &b.w0).frobenius_norm())
                .max((&a.w1 - &b.w1).frobenius_norm());
        }
    }
    Ok(max_abs([gap]))
}
