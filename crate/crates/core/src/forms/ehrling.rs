//! Optimal constant in `‖Su‖_Z ≤ ε ‖u‖_V + c ‖Tu‖_H`.
//!
//! Squaring and using `(εx + cy)² = min_{0<θ<1} (ε²x²/θ + c²y²/(1-θ))`, the
//! inequality holds for a given `c` exactly when
//! `(ε²/θ) G_V + (c²/(1-θ)) T* G_H T - S* G_Z S ≥ 0` for every `θ ∈ (0, 1)`.
//! The smallest eigenvalue over `θ` is minimized on a logit grid refined by
//! golden-section search, and `c` is found by bisection.

use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix};
use crate::space::InnerProductSpace;

const REL_TOL: f64 = 1e-8;
const LOGIT_GRID: usize = 81;
const LOGIT_RANGE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EhrlingConstant {
    Finite(f64),
    /// `‖Su‖_Z > ε ‖u‖_V` for some `u ∈ Ker T`.
    Infinite,
}

impl EhrlingConstant {
    pub fn value(&self) -> f64 {
        match self {
            EhrlingConstant::Finite(c) => *c,
            EhrlingConstant::Infinite => f64::INFINITY,
        }
    }
}

/// Smallest `c ≥ 0` with `‖Su‖_Z ≤ ε ‖u‖_V + c ‖Tu‖_H` for all `u ∈ V`.
pub fn ehrling_constant(
    t: &CMatrix,
    s: &CMatrix,
    v: &InnerProductSpace,
    h: &InnerProductSpace,
    z: &InnerProductSpace,
    epsilon: f64,
) -> Result<EhrlingConstant> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(FormError::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if t.shape() != (h.dim(), v.dim()) || s.shape() != (z.dim(), v.dim()) {
        return Err(FormError::Dimension("T must map V to H and S must map V to Z".into()));
    }
    // Everything in V-orthonormal coordinates.
    let l = v.factor();
    let p = linalg::congruence_inv(l, &linalg::mul(&linalg::ad_mul(t, h.gram()), t));
    let q = linalg::congruence_inv(l, &linalg::mul(&linalg::ad_mul(s, z.gram()), s));

    let q_norm = linalg::spectral_norm(&q);
    if q_norm == 0.0 {
        return Ok(EhrlingConstant::Finite(0.0));
    }

    let problem = Feasibility {
        p,
        q,
        eps2: epsilon * epsilon,
    };
    if problem.feasible(0.0) {
        return Ok(EhrlingConstant::Finite(0.0));
    }

    // Kernel of T: there the inequality reads ‖Su‖ ≤ ε ‖u‖ regardless of c.
    let p_eig = linalg::hermitian_eigen(&problem.p);
    let p_scale = p_eig.values.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let kernel_cols: Vec<usize> = (0..p_eig.values.len())
        .filter(|&i| p_eig.values[i] <= 1e-12 * p_scale)
        .collect();
    if !kernel_cols.is_empty() {
        let k = p_eig.vectors.select_columns(&kernel_cols);
        let restricted = k.adjoint() * &problem.q * &k;
        let worst = *linalg::hermitian_eigen(&restricted).values.last().expect("non-empty");
        if worst > problem.eps2 * (1.0 + 1e-12) {
            return Ok(EhrlingConstant::Infinite);
        }
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while !problem.feasible(hi) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Ok(EhrlingConstant::Infinite);
        }
    }
    while hi - lo > REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if problem.feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EhrlingConstant::Finite(hi))
}

struct Feasibility {
    p: CMatrix,
    q: CMatrix,
    eps2: f64,
}

impl Feasibility {
    fn floor_at(&self, c: f64, logit: f64) -> f64 {
        let theta = 1.0 / (1.0 + (-logit).exp());
        let n = self.p.nrows();
        let m = CMatrix::identity(n, n) * linalg::re(self.eps2 / theta) + &self.p * linalg::re(c * c / (1.0 - theta))
            - &self.q;
        linalg::min_eigenvalue(&m)
    }

    fn feasible(&self, c: f64) -> bool {
        let step = 2.0 * LOGIT_RANGE / (LOGIT_GRID - 1) as f64;
        let grid: Vec<f64> = (0..LOGIT_GRID).map(|i| -LOGIT_RANGE + step * i as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&s| self.floor_at(c, s)).collect();
        let (best, &min) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty grid");
        if min < 0.0 {
            return false;
        }
        let a = grid[best.saturating_sub(1)];
        let b = grid[(best + 1).min(LOGIT_GRID - 1)];
        golden_min(|s| self.floor_at(c, s), a, b) >= 0.0
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = f1.min(f2);
    for _ in 0..60 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
        best = best.min(f1).min(f2);
        if (b - a).abs() < 1e-10 {
            break;
        }
    }
    best
}
