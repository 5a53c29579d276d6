//! Probe states, priors, isometry families and their channel outputs.
//!
//! Two built-in families are provided: the controlled-rotation dilation of the
//! phase damping channel and the two-qubit core entangling unitaries
//! `exp[-(i/2)(s_x XX + s_y YY + s_z ZZ)]` restricted to one free component.
//! In both, the environment starts in `|0⟩_E` and `V_s = U_s(· ⊗ |0⟩_E)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matlin::{herm_eig, kron, partial_trace, BipartiteDims, ComplexMatrix, Subsystem};
use crate::quadrature::{GaussLegendre, DEFAULT_NODES};
use crate::scalar::Real;

/// Pure qubit probe `√γ|0⟩ + e^{iφ}√(1−γ)|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeState<T> {
    pub gamma: T,
    pub phi: T,
}

impl<T: Real> ProbeState<T> {
    pub fn new(gamma: T, phi: T) -> Result<Self> {
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(out_of_range("gamma", gamma, T::zero(), T::one()));
        }
        let two_pi = T::TAU();
        if !(phi >= T::zero() && phi <= two_pi) {
            return Err(out_of_range("phi", phi, T::zero(), two_pi));
        }
        Ok(Self { gamma, phi })
    }

    pub fn ket(&self) -> [Complex<T>; 2] {
        let amp1 = (T::one() - self.gamma).sqrt();
        [
            Complex::new(self.gamma.sqrt(), T::zero()),
            Complex::from_polar(amp1, self.phi),
        ]
    }

    /// `ρ_A = |ψ⟩⟨ψ|`.
    pub fn density(&self) -> ComplexMatrix<T> {
        ComplexMatrix::outer(&self.ket(), &self.ket())
    }
}

/// The probe state as a density matrix.
pub fn probe_density<T: Real>(p: &ProbeState<T>) -> ComplexMatrix<T> {
    p.density()
}

fn out_of_range<T: Real>(name: &'static str, value: T, lower: T, upper: T) -> Error {
    Error::OutOfRange {
        name,
        value: value.to_f64_lossy(),
        lower: lower.to_f64_lossy(),
        upper: upper.to_f64_lossy(),
    }
}

type Density<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Prior density `p(s)` on `[lower, upper]` with its quadrature rule.
#[derive(Clone)]
pub struct Prior<T> {
    lower: T,
    upper: T,
    density: Density<T>,
    nodes: usize,
    /// `(s_k, w_k·p(s_k))` pairs.
    rule: Vec<(T, T)>,
}

impl<T: Real> fmt::Debug for Prior<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Prior")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("nodes", &self.nodes)
            .finish()
    }
}

impl<T: Real> Prior<T> {
    /// Uniform density on `[lower, upper]` with the default node count.
    pub fn uniform(lower: T, upper: T) -> Result<Self> {
        Self::uniform_with_nodes(lower, upper, DEFAULT_NODES)
    }

    pub fn uniform_with_nodes(lower: T, upper: T, nodes: usize) -> Result<Self> {
        check_interval(lower, upper)?;
        let height = T::one() / (upper - lower);
        Self::with_density(lower, upper, move |_| height, nodes)
    }

    /// Arbitrary density. Fails unless it integrates to one within `1e-10`
    /// under the rule being built.
    pub fn with_density(
        lower: T,
        upper: T,
        density: impl Fn(T) -> T + Send + Sync + 'static,
        nodes: usize,
    ) -> Result<Self> {
        Self::build(lower, upper, Arc::new(density), nodes)
    }

    fn build(lower: T, upper: T, density: Density<T>, nodes: usize) -> Result<Self> {
        check_interval(lower, upper)?;
        let gl = GaussLegendre::new(nodes)?;
        let rule: Vec<(T, T)> = gl
            .mapped(lower, upper)
            .into_iter()
            .map(|(s, w)| (s, w * density(s)))
            .collect();
        if rule.iter().any(|&(_, w)| !w.is_finite() || w < T::zero()) {
            return Err(Error::InvalidArgument(
                "prior density must be finite and nonnegative".into(),
            ));
        }
        let integral = rule.iter().fold(T::zero(), |acc, &(_, w)| acc + w);
        if (integral - T::one()).abs() > T::check_tol() {
            return Err(Error::PriorNotNormalized {
                integral: integral.to_f64_lossy(),
            });
        }
        Ok(Self {
            lower,
            upper,
            density,
            nodes,
            rule,
        })
    }

    /// Same density and interval with a different quadrature rule.
    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        Self::build(self.lower, self.upper, self.density.clone(), nodes)
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.nodes
    }

    pub fn density(&self, s: T) -> T {
        (self.density)(s)
    }

    /// Quadrature nodes paired with prior-weighted weights.
    pub fn rule(&self) -> &[(T, T)] {
        &self.rule
    }

    pub fn contains(&self, s: T) -> bool {
        let slack = (self.upper - self.lower) * T::lit(1e-12);
        s >= self.lower - slack && s <= self.upper + slack
    }

    /// `∫ p(s) f(s) ds`.
    pub fn expectation(&self, mut f: impl FnMut(T) -> T) -> T {
        self.rule.iter().fold(T::zero(), |acc, &(s, w)| acc + w * f(s))
    }

    pub fn mean(&self) -> T {
        self.expectation(|s| s)
    }

    pub fn second_moment(&self) -> T {
        self.expectation(|s| s * s)
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.second_moment() - m * m
    }
}

fn check_interval<T: Real>(lower: T, upper: T) -> Result<()> {
    if lower.is_finite() && upper.is_finite() && lower < upper {
        Ok(())
    } else {
        Err(Error::InvalidInterval {
            lower: lower.to_f64_lossy(),
            upper: upper.to_f64_lossy(),
        })
    }
}

type IsometryMap<T> = Arc<dyn Fn(T) -> ComplexMatrix<T> + Send + Sync>;

/// One-parameter family of isometries `V_s : ℋ_A → ℋ_B ⊗ ℋ_F` with a prior on `s`.
#[derive(Clone)]
pub struct IsometryFamily<T> {
    input_dim: usize,
    dims: BipartiteDims,
    prior: Prior<T>,
    v_of_s: IsometryMap<T>,
    label: String,
}

impl<T: Real> fmt::Debug for IsometryFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsometryFamily")
            .field("label", &self.label)
            .field("input_dim", &self.input_dim)
            .field("dims", &self.dims)
            .field("prior", &self.prior)
            .finish()
    }
}

/// Number of parameter samples used when validating a new family.
const VALIDATION_SAMPLES: usize = 9;

impl<T: Real> IsometryFamily<T> {
    /// Builds a family and verifies `V_s†V_s = I` at a few sampled `s`.
    pub fn new(
        label: impl Into<String>,
        input_dim: usize,
        dims: BipartiteDims,
        prior: Prior<T>,
        v_of_s: impl Fn(T) -> ComplexMatrix<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        let family = Self::new_unchecked(label, input_dim, dims, prior, v_of_s);
        let probe = family.v_unchecked(family.prior.lower);
        if probe.rows() != dims.total() || probe.cols() != input_dim {
            return Err(Error::DimensionMismatch {
                expected: dims.total() * input_dim,
                found: probe.rows() * probe.cols(),
            });
        }
        let violation = check_isometry(&family, VALIDATION_SAMPLES);
        if !(violation <= T::check_tol()) {
            return Err(Error::NotIsometry {
                violation: violation.to_f64_lossy(),
            });
        }
        Ok(family)
    }

    /// Builds a family without checking the isometry property.
    pub fn new_unchecked(
        label: impl Into<String>,
        input_dim: usize,
        dims: BipartiteDims,
        prior: Prior<T>,
        v_of_s: impl Fn(T) -> ComplexMatrix<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            input_dim,
            dims,
            prior,
            v_of_s: Arc::new(v_of_s),
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn prior(&self) -> &Prior<T> {
        &self.prior
    }

    /// Same isometry map under a different prior.
    pub fn with_prior(&self, prior: Prior<T>) -> Self {
        Self { prior, ..self.clone() }
    }

    /// Same family with `nodes` quadrature nodes.
    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        Ok(self.with_prior(self.prior.with_nodes(nodes)?))
    }

    /// `V_s`, checked against the prior interval.
    pub fn v(&self, s: T) -> Result<ComplexMatrix<T>> {
        if !self.prior.contains(s) {
            return Err(out_of_range("s", s, self.prior.lower, self.prior.upper));
        }
        Ok(self.v_unchecked(s))
    }

    fn v_unchecked(&self, s: T) -> ComplexMatrix<T> {
        (self.v_of_s)(s)
    }

    /// `V_s ρ V_s†` for an arbitrary input state.
    pub fn apply(&self, rho_a: &ComplexMatrix<T>, s: T) -> Result<ComplexMatrix<T>> {
        if rho_a.rows() != self.input_dim || rho_a.cols() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: rho_a.rows(),
            });
        }
        Ok(rho_a.conjugate_by(&self.v(s)?))
    }
}

/// `ρ(s) = V_s ρ_A V_s†`.
pub fn joint_output<T: Real>(f: &IsometryFamily<T>, probe: &ProbeState<T>, s: T) -> Result<ComplexMatrix<T>> {
    f.apply(&probe.density(), s)
}

/// `ρ_B(s) = Tr_F ρ(s)`.
pub fn output_b<T: Real>(f: &IsometryFamily<T>, probe: &ProbeState<T>, s: T) -> Result<ComplexMatrix<T>> {
    partial_trace(&joint_output(f, probe, s)?, f.dims(), Subsystem::B)
}

/// `ρ_F(s) = Tr_B ρ(s)`.
pub fn output_f<T: Real>(f: &IsometryFamily<T>, probe: &ProbeState<T>, s: T) -> Result<ComplexMatrix<T>> {
    partial_trace(&joint_output(f, probe, s)?, f.dims(), Subsystem::F)
}

/// Largest `‖V_s†V_s − I‖_F` over `samples` equally spaced points of the prior interval.
pub fn check_isometry<T: Real>(f: &IsometryFamily<T>, samples: usize) -> T {
    let samples = samples.max(1);
    let (lo, hi) = (f.prior.lower, f.prior.upper);
    let id = ComplexMatrix::identity(f.input_dim);
    (0..samples)
        .map(|k| {
            let s = if samples == 1 {
                (lo + hi) * T::lit(0.5)
            } else {
                lo + (hi - lo) * T::from_usize(k).unwrap() / T::from_usize(samples - 1).unwrap()
            };
            let v = f.v_unchecked(s);
            (&(&v.adjoint() * &v) - &id).frobenius_norm()
        })
        .fold(T::zero(), |m, x| if x.is_nan() { x } else { m.max(x) })
}

/// `U (· ⊗ |0⟩_E)`: the columns of `u` whose environment index is zero.
pub fn embed_environment_ground<T: Real>(u: &ComplexMatrix<T>, input_dim: usize, env_dim: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(u.rows(), input_dim, |r, a| u[(r, a * env_dim)])
}

/// Controlled rotation `|0⟩⟨0|⊗I + |1⟩⟨1|⊗(cos s·I + i sin s·σ_y)`.
pub fn controlled_rotation<T: Real>(s: T) -> ComplexMatrix<T> {
    let (sin, cos) = s.sin_cos();
    let p0 = ComplexMatrix::from_real_diagonal(&[T::one(), T::zero()]);
    let p1 = ComplexMatrix::from_real_diagonal(&[T::zero(), T::one()]);
    // i·σ_y = [[0, 1], [-1, 0]]
    let rot = ComplexMatrix::from_real(2, 2, &[cos, sin, -sin, cos]).expect("finite");
    &kron(&p0, &ComplexMatrix::identity(2)) + &kron(&p1, &rot)
}

/// Dilation of the phase damping channel; the prior interval must lie in `[0, π/2]`.
pub fn phase_damp_family<T: Real>(prior: Prior<T>) -> Result<IsometryFamily<T>> {
    let slack = T::lit(1e-12);
    if prior.lower() < -slack || prior.upper() > T::FRAC_PI_2() + slack {
        return Err(Error::InvalidInterval {
            lower: prior.lower().to_f64_lossy(),
            upper: prior.upper().to_f64_lossy(),
        });
    }
    IsometryFamily::new("phase-damping", 2, BipartiteDims::QUBITS, prior, |s| {
        embed_environment_ground(&controlled_rotation(s), 2, 2)
    })
}

/// Phase damping dilation with the uniform prior on `[0, π/2]`.
pub fn phase_damp_uniform<T: Real>(nodes: usize) -> Result<IsometryFamily<T>> {
    phase_damp_family(Prior::uniform_with_nodes(T::zero(), T::FRAC_PI_2(), nodes)?)
}

/// Component of `s⃗ = (s_x, s_y, s_z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoreComponent {
    X,
    Y,
    Z,
}

impl CoreComponent {
    pub fn name(self) -> &'static str {
        match self {
            CoreComponent::X => "s_x",
            CoreComponent::Y => "s_y",
            CoreComponent::Z => "s_z",
        }
    }

    pub fn index(self) -> usize {
        match self {
            CoreComponent::X => 0,
            CoreComponent::Y => 1,
            CoreComponent::Z => 2,
        }
    }

    /// The two fixed components, in `x, y, z` order.
    pub fn fixed_components(self) -> [CoreComponent; 2] {
        match self {
            CoreComponent::X => [CoreComponent::Y, CoreComponent::Z],
            CoreComponent::Y => [CoreComponent::X, CoreComponent::Z],
            CoreComponent::Z => [CoreComponent::X, CoreComponent::Y],
        }
    }
}

/// Which component of `s⃗` is estimated and the known values of the others.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoreUnitaryTarget<T> {
    pub estimated: CoreComponent,
    /// The other two components in `x, y, z` order (e.g. `(s_x, s_z)` when estimating `s_y`).
    pub fixed_values: [T; 2],
}

impl<T: Real> CoreUnitaryTarget<T> {
    pub fn new(estimated: CoreComponent, fixed_values: [T; 2]) -> Result<Self> {
        let names = estimated.fixed_components();
        for (v, c) in fixed_values.iter().zip(names) {
            if !(*v >= T::zero() && *v <= T::FRAC_PI_2()) {
                return Err(out_of_range(c.name(), *v, T::zero(), T::FRAC_PI_2()));
            }
        }
        let target = Self {
            estimated,
            fixed_values,
        };
        target.admissible_interval()?;
        Ok(target)
    }

    /// Range of the estimated component allowed by `π/2 ≥ s_x ≥ s_y ≥ s_z ≥ 0`.
    pub fn admissible_interval(&self) -> Result<(T, T)> {
        let [a, b] = self.fixed_values;
        let (lower, upper) = match self.estimated {
            // s_x ∈ [s_y, π/2] needs s_y ≥ s_z
            CoreComponent::X if a >= b => (a, T::FRAC_PI_2()),
            // s_y ∈ [s_z, s_x]
            CoreComponent::Y => (b, a),
            // s_z ∈ [0, s_y] needs s_x ≥ s_y
            CoreComponent::Z if a >= b => (T::zero(), b),
            _ => (T::one(), T::zero()),
        };
        if lower < upper {
            Ok((lower, upper))
        } else {
            Err(Error::EmptyInterval {
                component: self.estimated.name(),
                lower: lower.to_f64_lossy(),
                upper: upper.to_f64_lossy(),
            })
        }
    }

    /// Full `(s_x, s_y, s_z)` with the estimated component set to `s`.
    pub fn point(&self, s: T) -> [T; 3] {
        let mut out = [T::zero(); 3];
        out[self.estimated.index()] = s;
        for (v, c) in self.fixed_values.iter().zip(self.estimated.fixed_components()) {
            out[c.index()] = *v;
        }
        out
    }
}

/// `U(s⃗)` from its eight nonzero entries in the computational basis.
pub fn core_unitary<T: Real>(s: [T; 3]) -> ComplexMatrix<T> {
    let [sx, sy, sz] = s;
    let half = T::lit(0.5);
    let minus = (sx - sy) * half;
    let plus = (sx + sy) * half;
    let e_neg = Complex::from_polar(T::one(), -sz * half);
    let e_pos = Complex::from_polar(T::one(), sz * half);
    let mi = Complex::new(T::zero(), -T::one());
    let mut u = ComplexMatrix::zeros(4, 4);
    u[(0, 0)] = e_neg.scale(minus.cos());
    u[(0, 3)] = mi * e_neg.scale(minus.sin());
    u[(1, 1)] = e_pos.scale(plus.cos());
    u[(1, 2)] = mi * e_pos.scale(plus.sin());
    u[(2, 1)] = mi * e_pos.scale(plus.sin());
    u[(2, 2)] = e_pos.scale(plus.cos());
    u[(3, 0)] = mi * e_neg.scale(minus.sin());
    u[(3, 3)] = e_neg.scale(minus.cos());
    u
}

/// `U(s⃗)` by exponentiating the generator `s_x XX + s_y YY + s_z ZZ` through
/// its spectral decomposition.
pub fn core_unitary_from_generator<T: Real>(s: [T; 3]) -> Result<ComplexMatrix<T>> {
    let [sx, sy, sz] = s;
    let (x, y, z) = (pauli_x::<T>(), pauli_y::<T>(), pauli_z::<T>());
    let mut h = kron(&x, &x).scale(sx);
    h += &kron(&y, &y).scale(sy);
    h += &kron(&z, &z).scale(sz);
    let eig = herm_eig(&h)?;
    let phases: Vec<Complex<T>> = eig
        .eigenvalues
        .iter()
        .map(|&l| Complex::from_polar(T::one(), -l * T::lit(0.5)))
        .collect();
    let q = &eig.eigenvectors;
    let d = ComplexMatrix::from_fn(4, 4, |r, c| if r == c { phases[r] } else { Complex::zero() });
    Ok(&(q * &d) * &q.adjoint())
}

pub fn pauli_x<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real(2, 2, &[T::zero(), T::one(), T::one(), T::zero()]).expect("finite")
}

pub fn pauli_y<T: Real>() -> ComplexMatrix<T> {
    let i = Complex::new(T::zero(), T::one());
    ComplexMatrix::from_vec(2, 2, vec![Complex::zero(), -i, i, Complex::zero()]).expect("finite")
}

pub fn pauli_z<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_diagonal(&[T::one(), -T::one()])
}

/// Core entangling family; the prior interval must equal the admissible range
/// of the estimated component.
pub fn core_entangling_family<T: Real>(target: CoreUnitaryTarget<T>, prior: Prior<T>) -> Result<IsometryFamily<T>> {
    let (lower, upper) = target.admissible_interval()?;
    let slack = T::lit(1e-12);
    if (prior.lower() - lower).abs() > slack || (prior.upper() - upper).abs() > slack {
        return Err(Error::InvalidInterval {
            lower: prior.lower().to_f64_lossy(),
            upper: prior.upper().to_f64_lossy(),
        });
    }
    let label = format!("core-{}", target.estimated.name());
    IsometryFamily::new(label, 2, BipartiteDims::QUBITS, prior, move |s| {
        embed_environment_ground(&core_unitary(target.point(s)), 2, 2)
    })
}

/// Core entangling family with the uniform prior on the admissible range.
pub fn core_entangling_uniform<T: Real>(target: CoreUnitaryTarget<T>, nodes: usize) -> Result<IsometryFamily<T>> {
    let (lower, upper) = target.admissible_interval()?;
    core_entangling_family(target, Prior::uniform_with_nodes(lower, upper, nodes)?)
}

/// Closed-form matrix elements of `ρ_B`, `ρ_F` and `ρ(s⃗)` for the core family
/// with probe `(γ, φ)`. Used as an independent check on the numerical pipeline.
pub mod appendix {
    use super::*;

    fn c<T: Real>(re: T, im: T) -> Complex<T> {
        Complex::new(re, im)
    }

    fn hermitian_from_upper<T: Real>(n: usize, upper: &[(usize, usize, Complex<T>)]) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::zeros(n, n);
        for &(r, col, z) in upper {
            m[(r, col)] = z;
            if r != col {
                m[(col, r)] = z.conj();
            }
        }
        m
    }

    pub fn rho_b<T: Real>(s: [T; 3], gamma: T, phi: T) -> ComplexMatrix<T> {
        let [sx, sy, sz] = s;
        let half = T::lit(0.5);
        let k = ((T::one() - gamma) * gamma).sqrt();
        let th = sz + phi;
        let d = (gamma - half) * sx.cos() * sy.cos() + half * sx.sin() * sy.sin();
        hermitian_from_upper(
            2,
            &[
                (0, 0, c(half + d, T::zero())),
                (0, 1, c(k * sy.cos() * th.cos(), -k * sx.cos() * th.sin())),
                (1, 1, c(half - d, T::zero())),
            ],
        )
    }

    pub fn rho_f<T: Real>(s: [T; 3], gamma: T, phi: T) -> ComplexMatrix<T> {
        let [sx, sy, sz] = s;
        let half = T::lit(0.5);
        let k = ((T::one() - gamma) * gamma).sqrt();
        let th = sz + phi;
        let d = (gamma - half) * sx.sin() * sy.sin() + half * sx.cos() * sy.cos();
        hermitian_from_upper(
            2,
            &[
                (0, 0, c(half + d, T::zero())),
                (0, 1, c(k * sy.sin() * th.sin(), k * sx.sin() * th.cos())),
                (1, 1, c(half - d, T::zero())),
            ],
        )
    }

    pub fn rho_joint<T: Real>(s: [T; 3], x: T, phi: T) -> ComplexMatrix<T> {
        let [sx, sy, sz] = s;
        let half = T::lit(0.5);
        let k = (x * (T::one() - x)).sqrt();
        let th = sz + phi;
        let e_neg = Complex::from_polar(T::one(), -th);
        let e_pos = Complex::from_polar(T::one(), th);
        let i = c(T::zero(), T::one());
        let (cx, sxn, cy, syn) = (sx.cos(), sx.sin(), sy.cos(), sy.sin());
        let one = T::one();
        hermitian_from_upper(
            4,
            &[
                (0, 0, c(half * x * (one + cx * cy + sxn * syn), T::zero())),
                (0, 1, i * e_neg.scale(half * k * (sxn + syn))),
                (0, 2, e_neg.scale(half * k * (cx + cy))),
                (0, 3, i.scale(half * x * (sxn * cy - cx * syn))),
                (1, 1, c(half * (one - x) * (one - cx * cy + sxn * syn), T::zero())),
                (1, 2, -i.scale(half * (one - x) * (cx * syn + sxn * cy))),
                (1, 3, -e_pos.scale(half * k * (cx - cy))),
                (2, 2, c(half * (one - x) * (one + cx * cy - sxn * syn), T::zero())),
                (2, 3, i * e_pos.scale(half * k * (sxn - syn))),
                (3, 3, c(half * x * (one - cx * cy - sxn * syn), T::zero())),
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn kraus_apply(ks: &[ComplexMatrix<f64>], rho: &ComplexMatrix<f64>) -> ComplexMatrix<f64> {
        let mut out = ComplexMatrix::zeros(2, 2);
        for k in ks {
            out += &rho.conjugate_by(k);
        }
        out
    }

    #[test]
    fn probe_density_cases() {
        let p = ProbeState::new(1.0, 2.3).unwrap().density();
        assert!(p.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
        let p = ProbeState::new(0.0, 0.7).unwrap().density();
        assert!(p.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-15);
        let p = ProbeState::new(0.5, 0.0).unwrap().density();
        assert!(p.max_abs_diff(&ComplexMatrix::from_real(2, 2, &[0.5; 4]).unwrap()) < 1e-15);
        assert!(ProbeState::new(1.2, 0.0).is_err());
        assert!(ProbeState::new(0.5, 7.0).is_err());
    }

    #[test]
    fn phase_damp_identity_at_zero() {
        let f = phase_damp_uniform::<f64>(64).unwrap();
        let v0 = f.v(0.0).unwrap();
        let expected = kron(
            &ComplexMatrix::identity(2),
            &ComplexMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap(),
        );
        assert!(v0.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn phase_damp_kraus_forms() {
        let f = phase_damp_uniform::<f64>(64).unwrap();
        let probe = ProbeState::new(0.3, 1.1).unwrap();
        let s = FRAC_PI_3;
        let (sin, cos) = s.sin_cos();
        let rho = probe.density();

        let k0 = ComplexMatrix::from_real_diagonal(&[1.0, cos]);
        let k1 = ComplexMatrix::from_real_diagonal(&[0.0, -sin]);
        let b = output_b(&f, &probe, s).unwrap();
        assert!(b.max_abs_diff(&kraus_apply(&[k0, k1], &rho)) < 1e-14);

        let kt0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let rot = ComplexMatrix::from_real(2, 2, &[cos, sin, -sin, cos]).unwrap();
        let flip = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let kt1 = &rot * &flip;
        let fout = output_f(&f, &probe, s).unwrap();
        assert!(fout.max_abs_diff(&kraus_apply(&[kt0, kt1], &rho)) < 1e-14);
    }

    #[test]
    fn phase_damp_joint_output_at_gamma_zero() {
        let f = phase_damp_uniform::<f64>(64).unwrap();
        let probe = ProbeState::new(0.0, 0.4).unwrap();
        let s: f64 = 0.6;
        let psi = ComplexMatrix::from_real(2, 1, &[s.cos(), -s.sin()]).unwrap();
        let expected = kron(
            &ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
            &(&psi * &psi.adjoint()),
        );
        let got = joint_output(&f, &probe, s).unwrap();
        // Global phase e^{iφ} cancels in the density matrix.
        assert!(got.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn phase_damp_rejects_wide_interval() {
        let prior = Prior::uniform(0.0, PI).unwrap();
        assert!(phase_damp_family(prior).is_err());
    }

    #[test]
    fn joint_output_rejects_out_of_interval() {
        let f = phase_damp_uniform::<f64>(64).unwrap();
        let probe = ProbeState::new(0.5, 0.0).unwrap();
        assert!(matches!(joint_output(&f, &probe, 2.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn core_unitary_special_points() {
        assert!(core_unitary([0.0, 0.0, 0.0]).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let u = core_unitary([FRAC_PI_2, FRAC_PI_2, FRAC_PI_2]);
        assert!(u[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn admissible_intervals() {
        let t = CoreUnitaryTarget::new(CoreComponent::Y, [1.2, 0.3]).unwrap();
        assert_eq!(t.admissible_interval().unwrap(), (0.3, 1.2));
        assert_eq!(t.point(0.5), [1.2, 0.5, 0.3]);
        let t = CoreUnitaryTarget::new(CoreComponent::X, [0.4, 0.1]).unwrap();
        assert_eq!(t.admissible_interval().unwrap(), (0.4, FRAC_PI_2));
        let t = CoreUnitaryTarget::new(CoreComponent::Z, [0.9, 0.4]).unwrap();
        assert_eq!(t.admissible_interval().unwrap(), (0.0, 0.4));

        assert!(matches!(
            CoreUnitaryTarget::new(CoreComponent::Z, [0.3, 0.4]),
            Err(Error::EmptyInterval { .. })
        ));
        assert!(CoreUnitaryTarget::new(CoreComponent::Z, [0.3, 0.0]).is_err());
        assert!(CoreUnitaryTarget::new(CoreComponent::X, [2.0, 0.0]).is_err());
    }

    #[test]
    fn core_family_requires_matching_prior() {
        let t = CoreUnitaryTarget::new(CoreComponent::Y, [1.2, 0.3]).unwrap();
        let prior = Prior::uniform(0.0, 1.2).unwrap();
        assert!(core_entangling_family(t, prior).is_err());
        assert!(core_entangling_uniform(t, 32).is_ok());
    }

    #[test]
    fn scaled_map_violates_isometry() {
        let f = phase_damp_uniform::<f64>(16).unwrap();
        let g = f.clone();
        let scaled = IsometryFamily::new_unchecked("scaled", 2, BipartiteDims::QUBITS, f.prior().clone(), move |s| {
            g.v(s).unwrap().scale(1.1)
        });
        let violation = check_isometry(&scaled, 5);
        assert_relative_eq!(violation, 0.21 * 2f64.sqrt(), epsilon = 1e-12);
        assert!(check_isometry(&f, 50) <= 1e-12);
        let g = f.clone();
        let rebuilt = IsometryFamily::new("scaled", 2, BipartiteDims::QUBITS, f.prior().clone(), move |s| {
            g.v(s).unwrap().scale(1.1)
        });
        assert!(matches!(rebuilt, Err(Error::NotIsometry { .. })));
    }

    #[test]
    fn prior_moments_uniform() {
        let p = Prior::<f64>::uniform(0.0, FRAC_PI_2).unwrap();
        assert_relative_eq!(p.mean(), PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(p.second_moment(), PI * PI / 12.0, epsilon = 1e-14);
        assert_relative_eq!(p.variance(), PI * PI / 48.0, epsilon = 1e-14);
    }

    #[test]
    fn prior_validation() {
        assert!(matches!(
            Prior::<f64>::uniform(1.0, 1.0),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(matches!(
            Prior::with_density(0.0, 1.0, |_| 2.0, 16),
            Err(Error::PriorNotNormalized { .. })
        ));
        let tri = Prior::with_density(0.0, 1.0, |s| 2.0 * s, 16).unwrap();
        assert_relative_eq!(tri.mean(), 2.0 / 3.0, epsilon = 1e-14);
    }
}
