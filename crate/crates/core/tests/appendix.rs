use isoest::quantum::{
    appendix, core_unitary, core_unitary_from_generator, embed_environment_ground, pauli_x, pauli_y, pauli_z,
};
use isoest::{kron, partial_trace, BipartiteDims, ComplexMatrix64, ProbeState, Subsystem};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// `exp(−i/2·H)` by scaling and squaring a truncated Taylor series.
fn series_unitary(s: [f64; 3]) -> ComplexMatrix64 {
    let mut h = kron(&pauli_x(), &pauli_x()).scale(s[0]);
    h += &kron(&pauli_y(), &pauli_y()).scale(s[1]);
    h += &kron(&pauli_z(), &pauli_z()).scale(s[2]);
    let squarings = 6;
    let a = h.scale_complex(Complex64::new(0.0, -0.5 / f64::from(1 << squarings)));
    let mut term = ComplexMatrix64::identity(4);
    let mut sum = ComplexMatrix64::identity(4);
    for k in 1..30 {
        term = (&term * &a).scale(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn axis() -> Vec<f64> {
    (0..5).map(|k| FRAC_PI_2 * k as f64 / 4.0).collect()
}

#[test]
fn unitary_matches_series_and_spectral_exponentials() {
    for &sx in &axis() {
        for &sy in &axis() {
            for &sz in &axis() {
                let s = [sx, sy, sz];
                let u = core_unitary(s);
                assert!(u.max_abs_diff(&series_unitary(s)) < 1e-12, "{s:?}");
                assert!(
                    u.max_abs_diff(&core_unitary_from_generator(s).unwrap()) < 1e-12,
                    "{s:?}"
                );
                let gram = &u.adjoint() * &u;
                assert!(gram.max_abs_diff(&ComplexMatrix64::identity(4)) < 1e-13);
            }
        }
    }
}

#[test]
fn reduced_states_match_closed_forms() {
    let dims = BipartiteDims::new(2, 2);
    for &sx in &axis() {
        for &sy in &axis() {
            for &sz in &axis() {
                for gamma in [0.0, 0.25, 0.5, 0.9, 1.0] {
                    for phi in [0.0, 2.0, 4.5] {
                        let s = [sx, sy, sz];
                        let probe = ProbeState::new(gamma, phi).unwrap();
                        let v = embed_environment_ground(&core_unitary(s), 2, 2);
                        let rho = probe.density().conjugate_by(&v);
                        let ctx = format!("s={s:?} gamma={gamma} phi={phi}");
                        assert!(rho.max_abs_diff(&appendix::rho_joint(s, gamma, phi)) < 1e-10, "{ctx}");
                        let rb = partial_trace(&rho, dims, Subsystem::B).unwrap();
                        let rf = partial_trace(&rho, dims, Subsystem::F).unwrap();
                        assert!(rb.max_abs_diff(&appendix::rho_b(s, gamma, phi)) < 1e-10, "{ctx}");
                        assert!(rf.max_abs_diff(&appendix::rho_f(s, gamma, phi)) < 1e-10, "{ctx}");
                    }
                }
            }
        }
    }
}

#[test]
fn phase_enters_only_through_sz_plus_phi() {
    for &(sx, sy) in &[(1.3, 1.1), (0.9, 0.4)] {
        let a = appendix::rho_b([sx, sy, 0.2], 0.3, 0.5);
        let b = appendix::rho_b([sx, sy, 0.7], 0.3, 0.0);
        assert!(a.max_abs_diff(&b) < 1e-15);
    }
}
