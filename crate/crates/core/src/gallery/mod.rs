//! Concrete form pairs: interval finite-element models, truncated diagonal
//! operators and the 2×2 semigroup counterexample.

mod counterexample;
mod diagonal;
mod interval;

pub use counterexample::{counterexample_2x2, Counterexample};
pub use diagonal::{partial_sums, DiagonalKind, DiagonalModel};
pub use interval::{
    boundary_mass, build_dtn, build_interval_model, comparison_triple, dirichlet_ground_state, dirichlet_plus_zero,
    interior, lumped_mass, mass, rotated_subspace, stiffness, trace_map, weighted_mass, wentzell_space,
    BoundaryCondition, Coefficients, IntervalModelSpec,
};

use num_complex::Complex64;

use crate::error::Result;
use crate::forms::FormPair;

/// Dirichlet pair with constant weight: `j(u) = u/m`, so that `A = -m²Δ` for constant `m`.
pub fn multiplicative(n: usize, m: f64) -> Result<FormPair> {
    build_interval_model(&IntervalModelSpec::new(n, BoundaryCondition::Dirichlet).with_m(m))
}

/// Robin pair `∫ u' v̄' + k (|u(0)|² + |u(1)|²)` on `L²`.
pub fn robin(n: usize, k: f64) -> Result<FormPair> {
    build_interval_model(&IntervalModelSpec::new(n, BoundaryCondition::Robin { k }))
}

pub fn neumann(n: usize) -> Result<FormPair> {
    build_interval_model(&IntervalModelSpec::new(n, BoundaryCondition::Neumann))
}

pub fn dirichlet(n: usize) -> Result<FormPair> {
    build_interval_model(&IntervalModelSpec::new(n, BoundaryCondition::Dirichlet))
}

pub fn wentzell(n: usize, rho: f64, sigma: f64) -> Result<FormPair> {
    build_interval_model(&IntervalModelSpec::new(n, BoundaryCondition::Wentzell { rho, sigma }))
}

/// DtN pair with `α ≡ 1` and constant real `γ`.
pub fn dtn(n: usize, gamma: f64) -> Result<FormPair> {
    build_dtn(n, 1.0, Complex64::new(gamma, 0.0), None)
}
