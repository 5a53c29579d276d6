//! Dense complex linear algebra for the small operators used throughout the
//! crate, together with the anticommutator equation solver `a·x + x·a = 2b`.
//!
//! Matrices are row-major dense values. Tensor products follow the ordering
//! `{|0⟩|0⟩, |0⟩|1⟩, |1⟩|0⟩, |1⟩|1⟩}`, i.e. the first factor owns the slow
//! index.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix. Operators in this crate are square; isometries
/// `ℋ_A → ℋ_B ⊗ ℋ_F` are the only rectangular values.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = &self.data[r * self.cols + c];
                write!(f, "({:?}, {:?})  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Outcome of a Hermiticity test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianCheckReport<T> {
    /// `‖M − M†‖_F`.
    pub max_asymmetry: T,
    pub is_hermitian: bool,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        let m = Self { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[T]) -> Result<Self> {
        Self::from_vec(
            rows,
            cols,
            entries.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix (the row count otherwise).
    #[inline]
    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.scale(k)).collect(),
        }
    }

    pub fn scale_complex(&self, k: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * k).collect(),
        }
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()).scale(half)
        })
    }

    pub fn hermitian_check(&self, tol: T) -> HermitianCheckReport<T> {
        if !self.is_square() {
            return HermitianCheckReport {
                max_asymmetry: T::infinity(),
                is_hermitian: false,
            };
        }
        let mut acc = T::zero();
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc = acc + (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        let max_asymmetry = acc.sqrt();
        HermitianCheckReport {
            max_asymmetry,
            is_hermitian: max_asymmetry <= tol,
        }
    }

    /// Fails unless `‖M − M†‖_F ≤ tol·max(1, ‖M‖_F)`.
    pub fn ensure_hermitian(&self, tol: T) -> Result<()> {
        self.ensure_square()?;
        let scale = T::one().max(self.frobenius_norm());
        let report = self.hermitian_check(tol * scale);
        if report.is_hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                asymmetry: report.max_asymmetry.to_f64_lossy(),
            })
        }
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        Ok(self.matmul(rhs))
    }

    fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o = *o + a * *b;
                }
            }
        }
        out
    }

    /// `Tr(self · rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Complex<T> {
        assert_eq!((self.cols, self.rows), (rhs.rows, rhs.cols));
        let mut acc = Complex::zero();
        for r in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(r, k)] * rhs[(k, r)];
            }
        }
        acc
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> AddAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn add_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + *b;
        }
    }
}

/// Kronecker product `a ⊗ b`; `a` owns the slow index.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Which factor of `ℋ_B ⊗ ℋ_F` survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    B,
    F,
}

/// Subsystem dimensions `(d_B, d_F)` of a bipartite operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    pub b: usize,
    pub f: usize,
}

impl BipartiteDims {
    pub const QUBITS: BipartiteDims = BipartiteDims { b: 2, f: 2 };

    pub fn new(b: usize, f: usize) -> Self {
        Self { b, f }
    }

    pub fn total(&self) -> usize {
        self.b * self.f
    }
}

/// Traces out the subsystem not named by `keep`.
pub fn partial_trace<T: Real>(m: &ComplexMatrix<T>, dims: BipartiteDims, keep: Subsystem) -> Result<ComplexMatrix<T>> {
    let n = m.ensure_square()?;
    if n != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: n,
        });
    }
    let (db, df) = (dims.b, dims.f);
    Ok(match keep {
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..df).fold(Complex::zero(), |acc, f| acc + m[(i * df + f, j * df + f)])
        }),
        Subsystem::F => ComplexMatrix::from_fn(df, df, |i, j| {
            (0..db).fold(Complex::zero(), |acc, b| acc + m[(b * df + i, b * df + j)])
        }),
    })
}

/// Spectral decomposition `M = QΛQ†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let q = &self.eigenvectors;
        let lam = ComplexMatrix::from_real_diagonal(&self.eigenvalues);
        &(q * &lam) * &q.adjoint()
    }
}

/// Hermitian eigensolver (cyclic complex Jacobi).
///
/// Eigenvalues are sorted ascending with ties kept in Jacobi output order,
/// and each eigenvector's first non-negligible component is rotated to be
/// real positive, so the result is a deterministic function of the input.
pub fn herm_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    m.ensure_hermitian(T::check_tol())?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let floor = T::epsilon() * scale;

    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= floor {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let phase_floor = T::epsilon().sqrt();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let pivot = (0..n)
            .map(|r| v[(r, src)])
            .find(|z| z.norm() > phase_floor)
            .unwrap_or_else(Complex::one);
        let fix = pivot.conj().unscale(pivot.norm());
        for r in 0..n {
            eigenvectors[(r, dst)] = v[(r, src)] * fix;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn jacobi_rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let n = a.dim();
    let two = T::lit(2.0);
    let theta = (a[(q, q)].re - a[(p, p)].re) / (two * r);
    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
    let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    // J = diag(1, e^{-iα}) · R(θ) restricted to the (p, q) plane.
    let phase = apq.unscale(r).conj();
    let j_pp = Complex::new(c, T::zero());
    let j_pq = Complex::new(s, T::zero());
    let j_qp = phase.scale(-s);
    let j_qq = phase.scale(c);

    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();
}

/// Default relative degeneracy tolerance for [`solve_anticommutator`].
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

/// Solution of `a·x + x·a = 2b`.
#[derive(Clone, Debug)]
pub struct AnticommutatorSolution<T> {
    pub x: ComplexMatrix<T>,
    /// Set when some eigenvalue pair of `a` sums to zero and the matching
    /// component of `b` vanishes; `x` is then the minimum-norm solution.
    pub degenerate: bool,
    /// `‖a·x + x·a − 2b‖_F`.
    pub residual: T,
}

/// Solves `a·x + x·a = 2b` for Hermitian `a`, `b` in the eigenbasis of `a`.
///
/// With `a = QΛQ†` and `b̃ = Q†bQ`, the solution is `x̃_ij = 2·b̃_ij/(λ_i + λ_j)`.
/// Pairs with `|λ_i + λ_j| ≤ tol·max|λ|` are null directions: their component
/// is set to zero when `b̃_ij` also vanishes (flagging `degenerate`), and the
/// system is rejected as inconsistent otherwise.
pub fn solve_anticommutator<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: T,
) -> Result<AnticommutatorSolution<T>> {
    let n = a.ensure_square()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    b.ensure_hermitian(T::check_tol())?;
    let eig = herm_eig(a)?;
    let q = &eig.eigenvectors;
    let bt = &(&q.adjoint() * b) * q;

    let tol = tol.max(T::epsilon() * T::lit(10.0));
    let lam_max = eig.eigenvalues.iter().fold(T::zero(), |m, l| m.max(l.abs()));
    let null_floor = tol * lam_max;
    let b_floor = (tol * T::lit(1e2)).max(T::epsilon() * T::lit(1e4)) * b.frobenius_norm();

    let two = T::lit(2.0);
    let mut degenerate = false;
    let mut xt = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let denom = eig.eigenvalues[i] + eig.eigenvalues[j];
            if denom.abs() <= null_floor {
                let magnitude = bt[(i, j)].norm();
                if magnitude > b_floor {
                    return Err(Error::InconsistentDegenerate {
                        row: i,
                        col: j,
                        magnitude: magnitude.to_f64_lossy(),
                    });
                }
                degenerate = true;
            } else {
                xt[(i, j)] = bt[(i, j)].scale(two / denom);
            }
        }
    }
    let x = (&(q * &xt) * &q.adjoint()).hermitian_part();
    let residual = anticommutator_residual(a, &x, b);
    Ok(AnticommutatorSolution {
        x,
        degenerate,
        residual,
    })
}

/// `‖a·x + x·a − 2b‖_F`.
pub fn anticommutator_residual<T: Real>(a: &ComplexMatrix<T>, x: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    let lhs = &(a * x) + &(x * a);
    (&lhs - &b.scale(T::lit(2.0))).frobenius_norm()
}
