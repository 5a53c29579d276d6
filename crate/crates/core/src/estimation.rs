//! Single-system minimum mean-square-error estimation.
//!
//! For a state family `ρ(s)` with prior `p(s)` the moment operators
//! `W⁽⁰⁾ = ∫p(s)ρ(s)ds` and `W⁽¹⁾ = ∫s·p(s)ρ(s)ds` determine the optimal
//! estimator `Ŝ` through `W⁽⁰⁾Ŝ + ŜW⁽⁰⁾ = 2W⁽¹⁾`, and the average quadratic
//! cost of any Hermitian `Ŝ` is `Tr[W⁽⁰⁾Ŝ²] − 2Tr[W⁽¹⁾Ŝ] + ∫s²p(s)ds`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matlin::{
    herm_eig, partial_trace, solve_anticommutator, BipartiteDims, ComplexMatrix, Subsystem, DEFAULT_DEGENERACY_TOL,
};
use crate::quantum::{IsometryFamily, Prior, ProbeState};
use crate::scalar::Real;

/// Prior-weighted zeroth and first moments of a state family, plus the
/// scalar moments of the prior itself.
#[derive(Clone, Debug)]
pub struct MomentOperators<T> {
    pub w0: ComplexMatrix<T>,
    pub w1: ComplexMatrix<T>,
    /// `∫ s² p(s) ds`.
    pub m2: T,
    /// `∫ s p(s) ds`.
    pub mean: T,
}

impl<T: Real> MomentOperators<T> {
    pub fn dim(&self) -> usize {
        self.w0.dim()
    }

    pub fn prior_variance(&self) -> T {
        self.m2 - self.mean * self.mean
    }

    /// Moments of the reduced family `Tr_{other}(ρ(s))`.
    pub fn marginal(&self, dims: BipartiteDims, keep: Subsystem) -> Result<Self> {
        Ok(Self {
            w0: partial_trace(&self.w0, dims, keep)?,
            w1: partial_trace(&self.w1, dims, keep)?,
            m2: self.m2,
            mean: self.mean,
        })
    }

    /// Verifies: `w0` Hermitian PSD with unit trace, `Tr(w1) = mean`, `m2 ≥ mean²`.
    pub fn validate(&self) -> Result<()> {
        let tol = T::check_tol();
        self.w0.ensure_hermitian(tol)?;
        self.w1.ensure_hermitian(tol)?;
        if self.w1.rows() != self.w0.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.w0.rows(),
                found: self.w1.rows(),
            });
        }
        let eig = herm_eig(&self.w0)?;
        if eig.eigenvalues[0] < -tol {
            return Err(Error::InvalidArgument(format!(
                "W0 is not positive semidefinite (min eigenvalue {:e})",
                eig.eigenvalues[0]
            )));
        }
        let tr0 = self.w0.trace().re;
        if (tr0 - T::one()).abs() > tol {
            return Err(Error::InvalidArgument(format!("Tr W0 = {tr0}, expected 1")));
        }
        let tr1 = self.w1.trace().re;
        if (tr1 - self.mean).abs() > tol * T::one().max(self.mean.abs()) {
            return Err(Error::InvalidArgument(format!("Tr W1 = {tr1}, expected {}", self.mean)));
        }
        if self.prior_variance() < -tol {
            return Err(Error::InvalidArgument("second moment below squared mean".into()));
        }
        Ok(())
    }
}

/// Moment operators of `rho_of_s` under `prior`, by the prior's quadrature rule.
pub fn moments<T: Real>(
    mut rho_of_s: impl FnMut(T) -> Result<ComplexMatrix<T>>,
    prior: &Prior<T>,
) -> Result<MomentOperators<T>> {
    let mut w0: Option<ComplexMatrix<T>> = None;
    let mut w1: Option<ComplexMatrix<T>> = None;
    for &(s, w) in prior.rule() {
        let rho = rho_of_s(s)?;
        rho.ensure_square()?;
        match (&mut w0, &mut w1) {
            (Some(a), Some(b)) => {
                if rho.rows() != a.rows() {
                    return Err(Error::DimensionMismatch {
                        expected: a.rows(),
                        found: rho.rows(),
                    });
                }
                *a += &rho.scale(w);
                *b += &rho.scale(w * s);
            }
            _ => {
                w0 = Some(rho.scale(w));
                w1 = Some(rho.scale(w * s));
            }
        }
    }
    let (w0, w1) = (w0.expect("rule is nonempty"), w1.expect("rule is nonempty"));
    Ok(MomentOperators {
        w0: w0.hermitian_part(),
        w1: w1.hermitian_part(),
        m2: prior.second_moment(),
        mean: prior.mean(),
    })
}

/// Moments of the joint output `ρ(s) = V_s ρ_A V_s†`.
pub fn joint_moments<T: Real>(f: &IsometryFamily<T>, probe: &ProbeState<T>) -> Result<MomentOperators<T>> {
    let rho_a = probe.density();
    moments(|s| f.apply(&rho_a, s), f.prior())
}

/// Optimal Hermitian estimator with its cost.
#[derive(Clone, Debug)]
pub struct EstimatorSolution<T> {
    pub estimator: ComplexMatrix<T>,
    /// Minimum average quadratic cost (radians²).
    pub cost: T,
    pub residual: T,
    pub degenerate: bool,
}

/// Solves `W⁽⁰⁾Ŝ + ŜW⁽⁰⁾ = 2W⁽¹⁾`. When `W⁽⁰⁾` is singular the estimator
/// is the minimum-norm solution; its value on the unsupported subspace does
/// not affect the cost.
pub fn personik_solve<T: Real>(m: &MomentOperators<T>) -> Result<EstimatorSolution<T>> {
    personik_solve_with_tol(m, T::lit(DEFAULT_DEGENERACY_TOL))
}

pub fn personik_solve_with_tol<T: Real>(m: &MomentOperators<T>, tol: T) -> Result<EstimatorSolution<T>> {
    let sol = solve_anticommutator(&m.w0, &m.w1, tol)?;
    let cost = cost_of(&sol.x, m)?;
    Ok(EstimatorSolution {
        estimator: sol.x,
        cost,
        residual: sol.residual,
        degenerate: sol.degenerate,
    })
}

/// `Tr[W⁽⁰⁾Ŝ²] − 2Tr[W⁽¹⁾Ŝ] + m₂`.
pub fn cost_of<T: Real>(estimator: &ComplexMatrix<T>, m: &MomentOperators<T>) -> Result<T> {
    if estimator.rows() != m.dim() || estimator.cols() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: estimator.rows(),
        });
    }
    estimator.ensure_hermitian(T::check_tol())?;
    let sq = estimator * estimator;
    let two = T::lit(2.0);
    Ok(m.w0.trace_product(&sq).re - two * m.w1.trace_product(estimator).re + m.m2)
}

/// `∫ p(s) Tr[ρ(s)(Ŝ − sI)²] ds` evaluated directly by quadrature.
pub fn cost_by_quadrature<T: Real>(
    estimator: &ComplexMatrix<T>,
    mut rho_of_s: impl FnMut(T) -> Result<ComplexMatrix<T>>,
    prior: &Prior<T>,
) -> Result<T> {
    estimator.ensure_hermitian(T::check_tol())?;
    let n = estimator.ensure_square()?;
    let id = ComplexMatrix::identity(n);
    let mut acc = T::zero();
    for &(s, w) in prior.rule() {
        let rho = rho_of_s(s)?;
        let dev = estimator - &id.scale(s);
        acc = acc + w * rho.trace_product(&(&dev * &dev)).re;
    }
    Ok(acc)
}

/// `max{c_F − c_B, 0}`.
pub fn privacy<T: Real>(cost_b: T, cost_f: T) -> T {
    (cost_f - cost_b).max(T::zero())
}

/// Optimal single-system estimators on `B` and on `F` for one probe.
#[derive(Clone, Debug)]
pub struct ChannelCosts<T> {
    pub b: EstimatorSolution<T>,
    pub f: EstimatorSolution<T>,
}

impl<T: Real> ChannelCosts<T> {
    pub fn privacy(&self) -> T {
        privacy(self.b.cost, self.f.cost)
    }
}

/// Minimum costs through the channel (`B`) and its complement (`F`).
pub fn channel_costs<T: Real>(f: &IsometryFamily<T>, probe: &ProbeState<T>) -> Result<ChannelCosts<T>> {
    channel_costs_from_moments(&joint_moments(f, probe)?, f.dims())
}

pub fn channel_costs_from_moments<T: Real>(joint: &MomentOperators<T>, dims: BipartiteDims) -> Result<ChannelCosts<T>> {
    Ok(ChannelCosts {
        b: personik_solve(&joint.marginal(dims, Subsystem::B)?)?,
        f: personik_solve(&joint.marginal(dims, Subsystem::F)?)?,
    })
}

/// Privacy against an adversary who does not know the probe: the adversary's
/// cost is averaged over `averaging_grid`.
pub fn weak_privacy<T: Real>(
    f: &IsometryFamily<T>,
    probe: &ProbeState<T>,
    averaging_grid: &[ProbeState<T>],
) -> Result<T> {
    if averaging_grid.is_empty() {
        return Err(Error::InvalidArgument(
            "weak privacy needs a nonempty probe grid".into(),
        ));
    }
    let cost_b = channel_costs(f, probe)?.b.cost;
    let mut sum = T::zero();
    for p in averaging_grid {
        sum = sum + channel_costs(f, p)?.f.cost;
    }
    let avg = sum / T::from_usize(averaging_grid.len()).unwrap();
    Ok(privacy(cost_b, avg))
}

/// `γ ∈ {0, 0.1, …, 1}`.
pub fn default_gamma_grid<T: Real>() -> Vec<T> {
    (0..=10).map(|k| T::from_usize(k).unwrap() / T::lit(10.0)).collect()
}

/// `φ ∈ {0, π/8, …, 15π/8}`; `2π` is omitted as a duplicate of `0`.
pub fn default_phi_grid<T: Real>() -> Vec<T> {
    (0..16)
        .map(|k| T::PI() * T::from_usize(k).unwrap() / T::lit(8.0))
        .collect()
}

/// Cartesian product of the default `γ` and `φ` grids.
pub fn default_probe_grid<T: Real>() -> Vec<ProbeState<T>> {
    probe_grid(&default_gamma_grid(), &default_phi_grid()).expect("default grid is valid")
}

pub fn probe_grid<T: Real>(gammas: &[T], phis: &[T]) -> Result<Vec<ProbeState<T>>> {
    let mut out = Vec::with_capacity(gammas.len() * phis.len());
    for &g in gammas {
        for &p in phis {
            out.push(ProbeState::new(g, p)?);
        }
    }
    Ok(out)
}

/// Haar-random pure qubit probes: `γ = |⟨0|ψ⟩|²` is uniform on `[0, 1]` and
/// `φ` uniform on `[0, 2π)`.
pub fn haar_probe_sample<T: Real>(n: usize, seed: u64) -> Vec<ProbeState<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let g: f64 = rng.random();
            let p: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            ProbeState::new(T::lit(g), T::lit(p)).expect("in range")
        })
        .collect()
}

/// One outcome of the projective measurement defined by an estimator.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome<T> {
    pub outcome: T,
    pub projector: ComplexMatrix<T>,
}

/// Spectral measurement of a Hermitian estimator. Eigenvalues equal within
/// `1e-10` (relative) share one projector.
pub fn spectral_measurement<T: Real>(estimator: &ComplexMatrix<T>) -> Result<Vec<MeasurementOutcome<T>>> {
    let eig = herm_eig(estimator)?;
    let n = estimator.dim();
    let scale = eig.eigenvalues.iter().fold(T::one(), |m, l| m.max(l.abs()));
    let merge = T::check_tol() * scale;
    let mut out: Vec<MeasurementOutcome<T>> = Vec::new();
    let mut members = 0usize;
    let mut anchor = T::zero();
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        let col: Vec<Complex<T>> = (0..n).map(|r| eig.eigenvectors[(r, k)]).collect();
        let proj = ComplexMatrix::outer(&col, &col);
        match out.last_mut() {
            Some(last) if (lam - anchor).abs() <= merge => {
                last.projector += &proj;
                members += 1;
                let mf = T::from_usize(members).unwrap();
                last.outcome = last.outcome + (lam - last.outcome) / mf;
            }
            _ => {
                anchor = lam;
                members = 1;
                out.push(MeasurementOutcome {
                    outcome: lam,
                    projector: proj,
                });
            }
        }
    }
    Ok(out)
}
