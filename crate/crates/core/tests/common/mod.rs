#![allow(dead_code)]

use isoest::ComplexMatrix64;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix64 {
    ComplexMatrix64::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix64 {
    random_matrix(n, rng).hermitian_part()
}

/// `G·G† + shift·I`, positive definite for `shift > 0`.
pub fn random_positive(n: usize, shift: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix64 {
    let g = random_matrix(n, rng);
    (&(&g * &g.adjoint()) + &ComplexMatrix64::identity(n).scale(shift)).hermitian_part()
}

/// Random density matrix of full rank.
pub fn random_density(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix64 {
    let p = random_positive(n, 0.05, rng);
    let tr = p.trace().re;
    p.scale(1.0 / tr)
}

pub fn to_na(m: &ComplexMatrix64) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

/// Solves `a·x + x·a = 2b` through the vectorized system
/// `(I ⊗ a + aᵀ ⊗ I) vec(x) = 2 vec(b)` by SVD least squares.
pub fn vectorized_solve(a: &ComplexMatrix64, b: &ComplexMatrix64) -> ComplexMatrix64 {
    let n = a.rows();
    let a_na = to_na(a);
    let id = DMatrix::<Complex64>::identity(n, n);
    let op = id.kronecker(&a_na) + a_na.transpose().kronecker(&id);
    let rhs = DMatrix::from_fn(n * n, 1, |k, _| b[(k % n, k / n)] * 2.0);
    let sol = op.svd(true, true).solve(&rhs, 1e-13).expect("svd solve");
    ComplexMatrix64::from_fn(n, n, |r, c| sol[(c * n + r, 0)])
}
