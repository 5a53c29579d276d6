//! Cooperative estimation with local measurements `Ŝ = Ŝ_B ⊗ Ŝ_F`.
//!
//! Stationarity of the cost along `H_B ⊗ I` and `I ⊗ H_F` gives the coupled
//! equations
//!
//! ```text
//! W̃_B Ŝ_B + Ŝ_B W̃_B = 2 W⁽¹⁾_B,   W̃_B = Tr_F[W⁽⁰⁾ (I ⊗ Ŝ_F)]      (1a)
//! W̃_F Ŝ_F + Ŝ_F W̃_F = 2 W⁽¹⁾_F,   W̃_F = Tr_B[W⁽⁰⁾ (Ŝ_B ⊗ I)]      (1b)
//! ```
//!
//! Three solvers are provided: fixed-point alternation on (1a)/(1b), exact
//! block-coordinate descent on the cost, and a seeded random search over
//! `Ŝ_F`. [`cooperative_min`] runs the enabled ones and keeps the cheapest
//! pair. The identity `Ŝ_F = I` is always a candidate, so the result never
//! exceeds the unassisted cost on `B`.

use std::fmt;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::estimation::{cost_of, joint_moments, MomentOperators};
use crate::matlin::{
    anticommutator_residual, kron, partial_trace, solve_anticommutator, AnticommutatorSolution, BipartiteDims,
    ComplexMatrix, Subsystem,
};
use crate::quantum::{IsometryFamily, ProbeState};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverMethod {
    FixedPoint,
    ExactAlternating,
    RandomSearch,
}

impl SolverMethod {
    pub const ALL: [SolverMethod; 3] = [
        SolverMethod::FixedPoint,
        SolverMethod::ExactAlternating,
        SolverMethod::RandomSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverMethod::FixedPoint => "fixed_point",
            SolverMethod::ExactAlternating => "exact_alternating",
            SolverMethod::RandomSearch => "random_search",
        }
    }
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_point" | "fixed-point" => Ok(SolverMethod::FixedPoint),
            "exact_alternating" | "exact-alternating" => Ok(SolverMethod::ExactAlternating),
            "random_search" | "random-search" | "gue" => Ok(SolverMethod::RandomSearch),
            other => Err(Error::InvalidArgument(format!("unknown solver method `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverReport<T> {
    pub method: SolverMethod,
    pub iterations: usize,
    /// `‖W̃_B Ŝ_B + Ŝ_B W̃_B − 2W⁽¹⁾_B‖_F` at the returned pair.
    pub residual_1a: T,
    /// `‖W̃_F Ŝ_F + Ŝ_F W̃_F − 2W⁽¹⁾_F‖_F` at the returned pair.
    pub residual_1b: T,
    pub converged: bool,
    pub restarts_used: usize,
    pub seed: u64,
    /// Cost after every half-step (exact alternating only).
    pub cost_trace: Vec<T>,
    /// Best converged fixed-point cost minus best exact-alternating cost,
    /// filled in by [`cooperative_min`] when both ran.
    pub method_gap: Option<T>,
    pub notes: Vec<String>,
}

impl<T: Real> SolverReport<T> {
    fn new(method: SolverMethod, seed: u64) -> Self {
        Self {
            method,
            iterations: 0,
            residual_1a: T::nan(),
            residual_1b: T::nan(),
            converged: false,
            restarts_used: 0,
            seed,
            cost_trace: Vec::new(),
            method_gap: None,
            notes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoopConfig<T> {
    /// Residual bound (fixed point) or relative cost decrease (exact alternating).
    pub tolerance: T,
    pub max_iterations: usize,
    /// Starting points per iterative method, and candidates for the random search.
    pub restarts: usize,
    pub seed: u64,
    pub methods: Vec<SolverMethod>,
}

impl<T: Real> Default for CoopConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-10),
            max_iterations: 500,
            restarts: 32,
            seed: 0,
            methods: SolverMethod::ALL.to_vec(),
        }
    }
}

impl<T: Real> CoopConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero()) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_methods(mut self, methods: &[SolverMethod]) -> Self {
        self.methods = methods.to_vec();
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

/// Local estimator pair with its cost.
#[derive(Clone, Debug)]
pub struct LocalEstimatorPair<T> {
    pub s_b: ComplexMatrix<T>,
    pub s_f: ComplexMatrix<T>,
    /// `C̄(Ŝ_B ⊗ Ŝ_F)` (radians²).
    pub cost: T,
    pub report: SolverReport<T>,
}

impl<T: Real> LocalEstimatorPair<T> {
    pub fn product(&self) -> ComplexMatrix<T> {
        kron(&self.s_b, &self.s_f)
    }
}

/// `W̃_B = Tr_F[W⁽⁰⁾(I ⊗ Ŝ_F)]` and `W̃_F = Tr_B[W⁽⁰⁾(Ŝ_B ⊗ I)]`.
pub fn tilde_moments<T: Real>(
    w0: &ComplexMatrix<T>,
    s_b: &ComplexMatrix<T>,
    s_f: &ComplexMatrix<T>,
    dims: BipartiteDims,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    Ok((tilde_b(w0, s_f, dims)?, tilde_f(w0, s_b, dims)?))
}

fn check_local<T: Real>(op: &ComplexMatrix<T>, expected: usize) -> Result<()> {
    if op.rows() != expected || op.cols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: op.rows(),
        });
    }
    Ok(())
}

fn tilde_b<T: Real>(w0: &ComplexMatrix<T>, s_f: &ComplexMatrix<T>, dims: BipartiteDims) -> Result<ComplexMatrix<T>> {
    check_local(s_f, dims.f)?;
    let prod = w0.try_matmul(&kron(&ComplexMatrix::identity(dims.b), s_f))?;
    Ok(partial_trace(&prod, dims, Subsystem::B)?.hermitian_part())
}

fn tilde_f<T: Real>(w0: &ComplexMatrix<T>, s_b: &ComplexMatrix<T>, dims: BipartiteDims) -> Result<ComplexMatrix<T>> {
    check_local(s_b, dims.b)?;
    let prod = w0.try_matmul(&kron(s_b, &ComplexMatrix::identity(dims.f)))?;
    Ok(partial_trace(&prod, dims, Subsystem::F)?.hermitian_part())
}

/// Solves (1a) for `Ŝ_B` given `Ŝ_F`.
pub fn solve_1a<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    s_f: &ComplexMatrix<T>,
    tol: T,
) -> Result<AnticommutatorSolution<T>> {
    let w1_b = partial_trace(&m.w1, dims, Subsystem::B)?;
    solve_anticommutator(&tilde_b(&m.w0, s_f, dims)?, &w1_b, tol)
}

/// Solves (1b) for `Ŝ_F` given `Ŝ_B`.
pub fn solve_1b<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    s_b: &ComplexMatrix<T>,
    tol: T,
) -> Result<AnticommutatorSolution<T>> {
    let w1_f = partial_trace(&m.w1, dims, Subsystem::F)?;
    solve_anticommutator(&tilde_f(&m.w0, s_b, dims)?, &w1_f, tol)
}

/// Residuals of (1a) and (1b) at a pair.
pub fn theorem_residuals<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    s_b: &ComplexMatrix<T>,
    s_f: &ComplexMatrix<T>,
) -> Result<(T, T)> {
    let (wt_b, wt_f) = tilde_moments(&m.w0, s_b, s_f, dims)?;
    let w1_b = partial_trace(&m.w1, dims, Subsystem::B)?;
    let w1_f = partial_trace(&m.w1, dims, Subsystem::F)?;
    Ok((
        anticommutator_residual(&wt_b, s_b, &w1_b),
        anticommutator_residual(&wt_f, s_f, &w1_f),
    ))
}

/// Cost of `Ŝ_B ⊗ Ŝ_F` under the joint moments.
pub fn product_cost<T: Real>(m: &MomentOperators<T>, s_b: &ComplexMatrix<T>, s_f: &ComplexMatrix<T>) -> Result<T> {
    cost_of(&kron(s_b, s_f), m)
}

/// Fixes the scalar freedom `(Ŝ_B, Ŝ_F) → (c·Ŝ_B, Ŝ_F/c)` so that
/// `‖Ŝ_F‖_F = √d_F` and `Tr Ŝ_F ≥ 0`. A zero `Ŝ_F` is returned unchanged.
pub fn normalize_gauge<T: Real>(
    s_b: &ComplexMatrix<T>,
    s_f: &ComplexMatrix<T>,
) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let norm = s_f.frobenius_norm();
    if !(norm > T::zero()) || !norm.is_finite() {
        return (s_b.clone(), s_f.clone());
    }
    let mut c = norm / T::from_usize(s_f.dim()).unwrap().sqrt();
    if s_f.trace().re < T::zero() {
        c = -c;
    }
    (s_b.scale(c), s_f.scale(T::one() / c))
}

fn normalize_single<T: Real>(s_f: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    normalize_gauge(&ComplexMatrix::zeros(1, 1), s_f).1
}

/// Fixed-point alternation on (1a)/(1b) starting from `init_s_f`.
///
/// Non-convergence is reported through `report.converged`, not as an error.
pub fn fixed_point_solve<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    cfg: &CoopConfig<T>,
    init_s_f: &ComplexMatrix<T>,
) -> Result<LocalEstimatorPair<T>> {
    cfg.validate()?;
    check_local(init_s_f, dims.f)?;
    init_s_f.ensure_hermitian(T::check_tol())?;
    let w1_b = partial_trace(&m.w1, dims, Subsystem::B)?;
    let w1_f = partial_trace(&m.w1, dims, Subsystem::F)?;
    let tol = cfg.tolerance;
    let mut report = SolverReport::new(SolverMethod::FixedPoint, cfg.seed);

    let mut s_f = normalize_single(&init_s_f.hermitian_part());
    let mut s_b = solve_anticommutator(&tilde_b(&m.w0, &s_f, dims)?, &w1_b, tol)?.x;
    for it in 1..=cfg.max_iterations {
        report.iterations = it;
        let next_f = solve_anticommutator(&tilde_f(&m.w0, &s_b, dims)?, &w1_f, tol)?.x;
        let next_f = normalize_single(&next_f);
        let next_b = solve_anticommutator(&tilde_b(&m.w0, &next_f, dims)?, &w1_b, tol)?.x;
        if !next_b.is_finite() || !next_f.is_finite() {
            report.notes.push(format!("non-finite iterate at iteration {it}"));
            break;
        }
        s_b = next_b;
        s_f = next_f;
        // (1a) holds by construction after the B update; (1b) measures the lag.
        let r1b = anticommutator_residual(&tilde_f(&m.w0, &s_b, dims)?, &s_f, &w1_f);
        if r1b <= tol {
            break;
        }
    }
    finish(m, dims, s_b, s_f, tol, report)
}

fn finish<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    s_b: ComplexMatrix<T>,
    s_f: ComplexMatrix<T>,
    tol: T,
    mut report: SolverReport<T>,
) -> Result<LocalEstimatorPair<T>> {
    let (s_b, s_f) = normalize_gauge(&s_b, &s_f);
    let (r1a, r1b) = theorem_residuals(m, dims, &s_b, &s_f)?;
    report.residual_1a = r1a;
    report.residual_1b = r1b;
    if report.method == SolverMethod::FixedPoint {
        report.converged = r1a.max(r1b) <= tol;
    }
    let cost = product_cost(m, &s_b, &s_f)?;
    Ok(LocalEstimatorPair { s_b, s_f, cost, report })
}

/// Exact minimizer of the cost over `Ŝ_B` for fixed `Ŝ_F`:
/// `M Ŝ_B + Ŝ_B M = 2N` with `M = Tr_F[W⁽⁰⁾(I ⊗ Ŝ_F²)]`, `N = Tr_F[W⁽¹⁾(I ⊗ Ŝ_F)]`.
pub fn best_response_b<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    s_f: &ComplexMatrix<T>,
    tol: T,
) -> Result<AnticommutatorSolution<T>> {
    check_local(s_f, dims.f)?;
    let id = ComplexMatrix::identity(dims.b);
    let mm = partial_trace(&(&m.w0 * &kron(&id, &(s_f * s_f))), dims, Subsystem::B)?.hermitian_part();
    let nn = partial_trace(&(&m.w1 * &kron(&id, s_f)), dims, Subsystem::B)?.hermitian_part();
    solve_anticommutator(&mm, &nn, tol)
}

/// Exact minimizer of the cost over `Ŝ_F` for fixed `Ŝ_B`.
pub fn best_response_f<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    s_b: &ComplexMatrix<T>,
    tol: T,
) -> Result<AnticommutatorSolution<T>> {
    check_local(s_b, dims.b)?;
    let id = ComplexMatrix::identity(dims.f);
    let mm = partial_trace(&(&m.w0 * &kron(&(s_b * s_b), &id)), dims, Subsystem::F)?.hermitian_part();
    let nn = partial_trace(&(&m.w1 * &kron(s_b, &id)), dims, Subsystem::F)?.hermitian_part();
    solve_anticommutator(&mm, &nn, tol)
}

/// Block-coordinate descent on `C̄(Ŝ_B ⊗ Ŝ_F)`; each half-step is an exact
/// convex minimization, so the cost never increases. Stops once a full
/// iteration lowers the cost by at most `tolerance` relative.
pub fn exact_alternating_solve<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    cfg: &CoopConfig<T>,
    init_s_f: &ComplexMatrix<T>,
) -> Result<LocalEstimatorPair<T>> {
    cfg.validate()?;
    check_local(init_s_f, dims.f)?;
    init_s_f.ensure_hermitian(T::check_tol())?;
    if !(init_s_f.frobenius_norm() > T::zero()) {
        return Err(Error::InvalidArgument("initial S_F must be nonzero".into()));
    }
    let tol = cfg.tolerance;
    let mut report = SolverReport::new(SolverMethod::ExactAlternating, cfg.seed);

    let mut s_f = normalize_single(&init_s_f.hermitian_part());
    let mut s_b = best_response_b(m, dims, &s_f, tol)?.x;
    let mut prev = product_cost(m, &s_b, &s_f)?;
    report.cost_trace.push(prev);
    for it in 1..=cfg.max_iterations {
        report.iterations = it;
        let next_f = best_response_f(m, dims, &s_b, tol)?.x;
        if !(next_f.frobenius_norm() > T::zero()) {
            report.notes.push("best response on F vanished".into());
            report.converged = true;
            break;
        }
        (s_b, s_f) = normalize_gauge(&s_b, &next_f);
        report.cost_trace.push(product_cost(m, &s_b, &s_f)?);
        s_b = best_response_b(m, dims, &s_f, tol)?.x;
        let cost = product_cost(m, &s_b, &s_f)?;
        report.cost_trace.push(cost);
        let decrease = prev - cost;
        prev = cost;
        if decrease <= tol * cost.abs().max(T::epsilon()) {
            report.converged = true;
            break;
        }
    }
    finish(m, dims, s_b, s_f, tol, report)
}

/// `(G + G†)/2` with iid standard complex Gaussian entries.
pub fn gue_sample<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(T::lit(re * scale), T::lit(im * scale))
    });
    g.hermitian_part()
}

/// `Ŝ_F` candidates: the identity first, then `count − 1` GUE draws.
pub fn candidate_starts<T: Real>(dim: usize, count: usize, seed: u64) -> Vec<ComplexMatrix<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count.max(1));
    out.push(ComplexMatrix::identity(dim));
    for _ in 1..count {
        out.push(gue_sample(dim, &mut rng));
    }
    out
}

/// Random search over `Ŝ_F`: for each candidate, `Ŝ_B` is taken from (1a)
/// and from the exact best response, keeping the cheaper.
pub fn gue_random_search<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    cfg: &CoopConfig<T>,
) -> Result<LocalEstimatorPair<T>> {
    cfg.validate()?;
    let tol = cfg.tolerance;
    let mut report = SolverReport::new(SolverMethod::RandomSearch, cfg.seed);
    report.restarts_used = cfg.restarts;
    let mut best: Option<(T, ComplexMatrix<T>, ComplexMatrix<T>)> = None;
    for (k, s_f) in candidate_starts::<T>(dims.f, cfg.restarts, cfg.seed)
        .into_iter()
        .enumerate()
    {
        report.iterations += 1;
        let from_1a = solve_1a(m, dims, &s_f, tol);
        let from_best = best_response_b(m, dims, &s_f, tol);
        for (label, sol) in [("(1a)", from_1a), ("best response", from_best)] {
            match sol {
                Ok(sol) => {
                    let cost = product_cost(m, &sol.x, &s_f)?;
                    if cost.is_finite() && best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                        best = Some((cost, sol.x, s_f.clone()));
                    }
                }
                Err(e) => report.notes.push(format!("candidate {k} {label} skipped: {e}")),
            }
        }
    }
    let (_, s_b, s_f) = best.ok_or_else(|| Error::SolversFailed("no random-search candidate was solvable".into()))?;
    report.converged = true;
    finish(m, dims, s_b, s_f, tol, report)
}

/// Seed for stream `k` derived from `seed` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Flag threshold for disagreement between the fixed-point and
/// exact-alternating minima.
pub const METHOD_GAP_FLAG: f64 = 1e-6;

/// Best local pair for family `f` and probe, over every enabled method.
pub fn cooperative_min<T: Real>(
    f: &IsometryFamily<T>,
    probe: &ProbeState<T>,
    cfg: &CoopConfig<T>,
) -> Result<LocalEstimatorPair<T>> {
    cooperative_min_from_moments(&joint_moments(f, probe)?, f.dims(), cfg)
}

/// As [`cooperative_min`], from precomputed joint moments.
pub fn cooperative_min_from_moments<T: Real>(
    m: &MomentOperators<T>,
    dims: BipartiteDims,
    cfg: &CoopConfig<T>,
) -> Result<LocalEstimatorPair<T>> {
    cfg.validate()?;
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no cooperative solver enabled".into()));
    }
    let starts = candidate_starts::<T>(dims.f, cfg.restarts, derive_seed(cfg.seed, 1));
    let mut failures = Vec::new();
    let mut best: Option<LocalEstimatorPair<T>> = None;
    let mut best_fixed: Option<T> = None;
    let mut best_exact: Option<T> = None;
    let consider = |pair: LocalEstimatorPair<T>, best: &mut Option<LocalEstimatorPair<T>>| {
        if pair.cost.is_finite() && best.as_ref().is_none_or(|b| pair.cost < b.cost) {
            *best = Some(pair);
        }
    };
    for method in methods {
        match method {
            SolverMethod::FixedPoint | SolverMethod::ExactAlternating => {
                for (k, s_f) in starts.iter().enumerate() {
                    let run = if method == SolverMethod::FixedPoint {
                        fixed_point_solve(m, dims, cfg, s_f)
                    } else {
                        exact_alternating_solve(m, dims, cfg, s_f)
                    };
                    match run {
                        Ok(pair) => {
                            let slot = if method == SolverMethod::FixedPoint {
                                pair.report.converged.then_some(&mut best_fixed)
                            } else {
                                Some(&mut best_exact)
                            };
                            if let Some(slot) = slot {
                                if slot.is_none_or(|c| pair.cost < c) {
                                    *slot = Some(pair.cost);
                                }
                            }
                            consider(pair, &mut best);
                        }
                        Err(e) => failures.push(format!("{method} start {k}: {e}")),
                    }
                }
            }
            SolverMethod::RandomSearch => {
                let sub = CoopConfig {
                    seed: derive_seed(cfg.seed, 2),
                    ..cfg.clone()
                };
                match gue_random_search(m, dims, &sub) {
                    Ok(pair) => consider(pair, &mut best),
                    Err(e) => failures.push(format!("{method}: {e}")),
                }
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::SolversFailed(failures.join("; ")))?;
    best.report.restarts_used = cfg.restarts;
    best.report.seed = cfg.seed;
    if let (Some(fp), Some(ex)) = (best_fixed, best_exact) {
        let gap = fp - ex;
        best.report.method_gap = Some(gap);
        if gap.abs() > T::lit(METHOD_GAP_FLAG) {
            best.report.notes.push(format!(
                "fixed-point and exact-alternating minima differ by {:e}",
                gap.to_f64_lossy()
            ));
        }
    }
    best.report.notes.extend(failures);
    Ok(best)
}

/// `Δ = C̄_B − C̄_BF`.
pub fn delta<T: Real>(cost_b_min: T, cost_bf_min: T) -> T {
    cost_b_min - cost_bf_min
}
