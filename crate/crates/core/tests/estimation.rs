use isoest::closedform;
use isoest::estimation::{cost_by_quadrature, moments};
use isoest::quantum::{controlled_rotation, embed_environment_ground};
use isoest::{
    channel_costs, core_entangling_uniform, cost_of, personik_solve, phase_damp_uniform, BipartiteDims,
    ComplexMatrix64, CoreComponent, CoreUnitaryTarget, IsometryFamily, Prior, ProbeState,
};

#[test]
fn constant_family_costs_prior_variance() {
    let prior = Prior::uniform(0.2, 1.1).unwrap();
    let v = embed_environment_ground(&controlled_rotation(0.4), 2, 2);
    let family = IsometryFamily::new("constant", 2, BipartiteDims::new(2, 2), prior, move |_| v.clone()).unwrap();
    for gamma in [0.0, 0.3, 1.0] {
        let probe = ProbeState::new(gamma, 1.0).unwrap();
        let costs = channel_costs(&family, &probe).unwrap();
        let variance = 0.9f64.powi(2) / 12.0;
        assert!((costs.b.cost - variance).abs() < 1e-12);
        assert!((costs.f.cost - variance).abs() < 1e-12);
    }
}

#[test]
fn phase_damping_matches_closed_forms() {
    let family = phase_damp_uniform::<f64>(64).unwrap();
    for k in 0..=20 {
        let gamma = k as f64 / 20.0;
        let costs = channel_costs(&family, &ProbeState::new(gamma, 0.0).unwrap()).unwrap();
        assert!(
            (costs.b.cost - closedform::cb_min(gamma).unwrap()).abs() < 1e-9,
            "gamma {gamma}"
        );
        assert!(
            (costs.f.cost - closedform::cf_min(gamma).unwrap()).abs() < 1e-9,
            "gamma {gamma}"
        );
    }
}

#[test]
fn optimal_estimator_matches_closed_form_matrix() {
    let family = phase_damp_uniform::<f64>(64).unwrap();
    for gamma in [0.3, 0.5, 0.77] {
        let costs = channel_costs(&family, &ProbeState::new(gamma, 0.0).unwrap()).unwrap();
        let expected = closedform::sb_opt(gamma).unwrap();
        assert!(costs.b.estimator.max_abs_diff(&expected) < 1e-9, "gamma {gamma}");
    }
}

#[test]
fn cost_formula_agrees_with_direct_quadrature() {
    let target = CoreUnitaryTarget::new(CoreComponent::Y, [1.2, 0.3]).unwrap();
    let family = core_entangling_uniform::<f64>(target, 64).unwrap();
    let probe = ProbeState::new(0.4, 0.8).unwrap();
    let rho_a = probe.density();
    let m = moments(|s| family.apply(&rho_a, s), family.prior()).unwrap();
    let sol = personik_solve(&m).unwrap();
    let direct = cost_by_quadrature(&sol.estimator, |s| family.apply(&rho_a, s), family.prior()).unwrap();
    assert!((sol.cost - direct).abs() < 1e-12);
    let perturbed = &sol.estimator + &ComplexMatrix64::identity(4).scale(1e-3);
    assert!(cost_of(&perturbed, &m).unwrap() > sol.cost);
}

#[test]
fn f32_pipeline_tracks_f64() {
    let f64_family = phase_damp_uniform::<f64>(32).unwrap();
    let f32_family = phase_damp_uniform::<f32>(32).unwrap();
    let c64 = channel_costs(&f64_family, &ProbeState::new(0.5, 0.0).unwrap()).unwrap();
    let c32 = channel_costs(&f32_family, &ProbeState::new(0.5f32, 0.0).unwrap()).unwrap();
    assert!((c64.b.cost - f64::from(c32.b.cost)).abs() < 1e-4);
    assert!((c64.f.cost - f64::from(c32.f.cost)).abs() < 1e-4);
}
