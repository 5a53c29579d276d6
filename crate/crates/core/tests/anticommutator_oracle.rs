mod common;

use common::{random_hermitian, random_positive, vectorized_solve};
use isoest::matlin::anticommutator_residual;
use isoest::solve_anticommutator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_vectorized_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..200 {
        let n = if k % 2 == 0 { 2 } else { 4 };
        let a = random_positive(n, 0.1, &mut rng);
        let b = random_hermitian(n, &mut rng);
        let ours = solve_anticommutator(&a, &b, 1e-10).unwrap();
        let oracle = vectorized_solve(&a, &b);
        let diff = ours.x.max_abs_diff(&oracle);
        assert!(diff < 1e-8, "instance {k}: diff {diff:e}");
        assert!(!ours.degenerate);
        assert!(ours.residual < 1e-10);
    }
}

#[test]
fn indefinite_but_nonsingular_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 50 {
        let a = random_hermitian(3, &mut rng);
        let eig = isoest::herm_eig(&a).unwrap();
        let min_sum = eig
            .eigenvalues
            .iter()
            .flat_map(|x| eig.eigenvalues.iter().map(move |y| (x + y).abs()))
            .fold(f64::INFINITY, f64::min);
        if min_sum < 0.05 {
            continue;
        }
        let b = random_hermitian(3, &mut rng);
        let ours = solve_anticommutator(&a, &b, 1e-10).unwrap();
        assert!(ours.x.max_abs_diff(&vectorized_solve(&a, &b)) < 1e-8);
        assert!(anticommutator_residual(&a, &ours.x, &b) < 1e-9);
        checked += 1;
    }
}

#[test]
fn singular_consistent_system_is_min_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let full = random_positive(3, 0.1, &mut rng);
        let eig = isoest::herm_eig(&full).unwrap();
        let q = &eig.eigenvectors;
        let lam = isoest::ComplexMatrix64::from_real_diagonal(&[0.0, eig.eigenvalues[1], eig.eigenvalues[2]]);
        let a = (&(q * &lam) * &q.adjoint()).hermitian_part();
        let x_true = random_hermitian(3, &mut rng);
        let b = (&(&a * &x_true) + &(&x_true * &a)).scale(0.5).hermitian_part();
        let ours = solve_anticommutator(&a, &b, 1e-10).unwrap();
        assert!(ours.degenerate);
        assert!(ours.residual < 1e-9);
        assert!(ours.x.max_abs_diff(&vectorized_solve(&a, &b)) < 1e-7);
    }
}
