//! Bayesian minimum mean square error estimation of parameters imprinted by
//! isometries `A → B ⊗ F`, with privacy against the environment `F` and
//! cooperative estimation through local measurements on `B` and `F`.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod cooperative;
pub mod error;
pub mod estimation;
pub mod matlin;
pub mod quadrature;
pub mod quantum;
pub mod scalar;

pub use cooperative::{
    cooperative_min, cooperative_min_from_moments, delta, CoopConfig, LocalEstimatorPair, SolverMethod, SolverReport,
};
pub use error::{Error, Result};
pub use estimation::{
    channel_costs, cost_of, joint_moments, personik_solve, privacy, ChannelCosts, EstimatorSolution, MomentOperators,
};
pub use matlin::{
    herm_eig, kron, partial_trace, solve_anticommutator, AnticommutatorSolution, BipartiteDims, ComplexMatrix,
    Subsystem,
};
pub use quantum::{
    core_entangling_uniform, phase_damp_uniform, CoreComponent, CoreUnitaryTarget, IsometryFamily, Prior, ProbeState,
};
pub use scalar::Real;

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type Prior64 = Prior<f64>;
pub type ProbeState64 = ProbeState<f64>;
pub type IsometryFamily64 = IsometryFamily<f64>;
pub type MomentOperators64 = MomentOperators<f64>;
pub type CoopConfig64 = CoopConfig<f64>;
pub type LocalEstimatorPair64 = LocalEstimatorPair<f64>;
