//! Domination of symmetric pairs on a common `H` and its consequences for
//! resolvents and semigroups.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::operator::{associated_operator, phi_functional_batch};
use super::FormPair;
use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix, CVector, DEFAULT_PSD_TOL};

const PROBE_SEED: u64 = 0xD0A1;
const RANDOM_PROBES: usize = 16;

/// Resolvent ordering at one shift `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCheck {
    pub gamma: f64,
    /// Smallest eigenvalue of `(γ + A₂)⁻¹ - (γ + A₁)⁻¹` in `H`-orthonormal coordinates.
    pub min_eigenvalue: f64,
}

impl GammaCheck {
    pub fn holds(&self, floor: f64) -> bool {
        self.min_eigenvalue >= floor
    }
}

/// Outcome of comparing `(a₁, j₁)` against `(a₂, j₂)`; "dominates" means
/// `(a₁, j₁) ≥ (a₂, j₂)`.
#[derive(Debug, Clone)]
pub struct DominationReport {
    /// `j₁(V₁) ⊂ j₂(V₂)`.
    pub range_inclusion: bool,
    /// `min (φ₁(x) - φ₂(x)) / ‖x‖²` over the basis and seeded random probes.
    pub phi_gap: f64,
    /// Smallest eigenvalue of `S_{a₁} - S_{a₂}` against `G_H`, i.e. the exact
    /// infimum of `(φ₁ - φ₂)(x) / ‖x‖²_H`.
    pub form_gap: f64,
    /// Magnitude of the compared quantities, used to scale the PSD floors.
    pub scale: f64,
    pub resolvents: Vec<GammaCheck>,
    /// Smallest eigenvalue of `e^{-A₂} - e^{-A₁}`.
    pub semigroup_min_eigenvalue: f64,
}

impl DominationReport {
    pub fn dominates(&self) -> bool {
        let floor = -DEFAULT_PSD_TOL * (1.0 + self.scale);
        self.range_inclusion && self.phi_gap >= floor && self.form_gap >= floor
    }

    /// Resolvent ordering at every grid point with eigenvalue floor `-floor`.
    pub fn resolvents_ordered(&self, floor: f64) -> bool {
        self.resolvents.iter().all(|c| c.holds(-floor))
    }

    /// `e^{-A₂} - e^{-A₁} ≥ 0` at `t = 1`.
    pub fn semigroup_order(&self) -> bool {
        self.semigroup_min_eigenvalue >= -DEFAULT_PSD_TOL
    }
}

pub fn check_domination(p1: &FormPair, p2: &FormPair, gamma_grid: &[f64]) -> Result<DominationReport> {
    if !p1.is_symmetric() || !p2.is_symmetric() {
        return Err(FormError::NotSymmetric);
    }
    if !p1.target().same_as(p2.target(), 1e-12) {
        return Err(FormError::Dimension("pairs have different reference spaces H".into()));
    }
    let h = p1.target();
    let n = h.dim();

    let stacked = CMatrix::from_fn(n, p1.j().ncols() + p2.j().ncols(), |i, k| {
        if k < p2.j().ncols() {
            p2.j()[(i, k)]
        } else {
            p1.j()[(i, k - p2.j().ncols())]
        }
    });
    let range_inclusion = linalg::numerical_rank(&stacked, 1e-10) == linalg::numerical_rank(p2.j(), 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let probes = CMatrix::from_fn(n, n + RANDOM_PROBES, |i, k| {
        if k < n {
            linalg::re(if i == k { 1.0 } else { 0.0 })
        } else {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            num_complex::Complex64::new(re, im)
        }
    });
    let phi1 = phi_functional_batch(p1, &probes)?;
    let phi2 = phi_functional_batch(p2, &probes)?;
    let mut phi_gap = f64::INFINITY;
    let mut scale = 0.0f64;
    for k in 0..probes.ncols() {
        let x: CVector = probes.column(k).into_owned();
        let norm2 = h.norm(&x).powi(2);
        phi_gap = phi_gap.min((phi1[k] - phi2[k]) / norm2);
        scale = scale.max(phi1[k].abs().max(phi2[k].abs()) / norm2);
    }

    let a1 = associated_operator(p1)?;
    let a2 = associated_operator(p2)?;
    let form_gap =
        linalg::min_generalized_eigenvalue(&linalg::hermitian_part(&(a1.form_on_h() - a2.form_on_h())), h.gram())?;

    // H-orthonormal coordinates: Ã = L⁻¹ S_a L⁻*.
    let l = h.factor();
    let t1 = linalg::congruence_inv(l, a1.form_on_h());
    let t2 = linalg::congruence_inv(l, a2.form_on_h());
    let identity = CMatrix::identity(n, n);
    let mut resolvents = Vec::with_capacity(gamma_grid.len());
    for &gamma in gamma_grid {
        let shift = identity.clone() * linalg::re(gamma);
        let r1 = invert(&(&shift + &t1))?;
        let r2 = invert(&(&shift + &t2))?;
        resolvents.push(GammaCheck {
            gamma,
            min_eigenvalue: linalg::min_eigenvalue(&linalg::hermitian_part(&(r2 - r1))),
        });
    }

    let s1 = linalg::hermitian_function(&t1, |x| (-x).exp());
    let s2 = linalg::hermitian_function(&t2, |x| (-x).exp());
    let semigroup_min_eigenvalue = linalg::min_eigenvalue(&linalg::hermitian_part(&(s2 - s1)));

    Ok(DominationReport {
        range_inclusion,
        phi_gap,
        form_gap,
        scale,
        resolvents,
        semigroup_min_eigenvalue,
    })
}

fn invert(m: &CMatrix) -> Result<CMatrix> {
    linalg::inverse_with_condition(m)
        .map(|(inv, _)| inv)
        .map_err(|condition| FormError::Singular {
            what: "gamma + A",
            condition,
        })
}
