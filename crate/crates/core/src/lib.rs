//! Maximal Bell correlations for pairs of commuting operator algebras on a
//! finite-dimensional Hilbert space.
//!
//! Algebras are unital *-subalgebras of `M_d(C)` given by Hermitian bases.
//! For a state `φ` the maximal Bell correlation
//! `β(φ, A, B) = sup ½ φ(a₁(b₁ + b₂) + a₂(b₁ − b₂))` over self-adjoint
//! contractions is computed by a see-saw ascent, and the state-independent
//! invariant `β(A, B)` by a minimax pair of solvers. The [`lattice`] module
//! provides a transverse-field Ising chain as a desk-scale net of local
//! algebras.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the unprefixed
//! aliases below fix `f64`.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bell;
pub mod cluster;
pub mod error;
pub mod invariant;
mod lanczos;
pub mod lattice;
pub mod linalg;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use linalg::OperatorMatrix;
pub use scalar::Real;

pub use algebra::{
    center, check_commuting, commutant, conditional_expectation, direct_sum_pair, generate_algebra, spectral_sign,
    structure_report, AlgebraStructure, MAX_AMBIENT_DIM,
};
pub use bell::{
    bell_operator, best_response, brute_force_beta, correlation_value, i2_generator_residuals, maximize_bell, see_saw,
    structural_diagnostics, OptimizerOptions,
};
pub use cluster::{
    clustering_bound, clustering_coefficient, distance_bound, distance_bound_limit, vacuum_decay_bound,
    verify_cluster_bound, SamplerOptions, VerifyOptions,
};
pub use invariant::{beta_inf, beta_star, min_expectation, minimax, minimax_gap};
pub use lattice::{build_chain, fit_decay, ground_state, region_algebra, separation_curve, RegionSpec};
pub use states::{make_state, trace_distance};

pub type Matrix = linalg::OperatorMatrix<f64>;
pub type Algebra = algebra::Algebra<f64>;
pub type State = states::State<f64>;
pub type StateSpec = states::StateSpec<f64>;
pub type BellCandidate = bell::BellCandidate<f64>;
pub type BellReport = bell::BellReport<f64>;
pub type Diagnostics = bell::Diagnostics<f64>;
pub type InvariantReport = invariant::InvariantReport<f64>;
pub type MinimaxReport = invariant::MinimaxReport<f64>;
pub type BoundParams = cluster::BoundParams<f64>;
pub type ClusterEstimate = cluster::ClusterEstimate<f64>;
pub type ClusterCheck = cluster::ClusterCheck<f64>;
pub type ChainModel = lattice::ChainModel<f64>;
pub type CurvePoint = lattice::CurvePoint<f64>;
pub type DecayFit = lattice::DecayFit<f64>;
