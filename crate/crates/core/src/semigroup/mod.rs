//! Semigroups `e^{-tA}`, resolvents `(λ + A)⁻¹`, Schatten norms between
//! weighted spaces, interpolation spaces and the convergence experiments.

mod experiments;
mod interpolation;
mod schatten;

pub use experiments::{
    fit_power_law, interpolated_convergence, mosco_surrogate, trace_convergence_experiment,
    ultracontractivity_exponent, ConvergenceReport, Family, InterpolatedConvergence, MoscoOptions, MoscoProbe,
    MoscoReport, PowerFit, TraceConvergence, UltracontractivityFit, MOSCO_NOTE,
};
pub use interpolation::{interpolation_space, three_factor_constant, InterpolatedSpace};
pub use schatten::{schatten_norm, SchattenReport};

use num_complex::Complex64;

use crate::error::{FormError, Result};
use crate::forms::AssociatedOperator;
use crate::linalg::{self, CMatrix};
use crate::space::InnerProductSpace;

/// Operator norm of `T: src -> dst`.
pub fn operator_norm(t: &CMatrix, src: &InnerProductSpace, dst: &InnerProductSpace) -> f64 {
    linalg::spectral_norm(&weighted(t, src, dst))
}

/// `L_dst* T L_src^{-*}`: `T` between the orthonormal frames of `src` and `dst`.
pub(crate) fn weighted(t: &CMatrix, src: &InnerProductSpace, dst: &InnerProductSpace) -> CMatrix {
    let left = linalg::ad_mul(dst.factor(), t);
    linalg::lower_solve(src.factor(), &left.adjoint()).adjoint()
}

/// `e^{-tA}` for all `t ≥ 0`, with the decomposition computed once.
#[derive(Debug, Clone)]
pub struct Semigroup {
    space: InnerProductSpace,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// `A = R diag(λ) L` with `R = L_H^{-*} U`, `L = U* L_H*`.
    Spectral {
        values: Vec<f64>,
        right: CMatrix,
        left: CMatrix,
    },
    General(CMatrix),
}

impl Semigroup {
    pub fn new(op: &AssociatedOperator) -> Self {
        let space = op.space().clone();
        let kind = if op.is_symmetric() || linalg::is_hermitian(op.form_on_h(), 1e-12) {
            let reduced = linalg::congruence_inv(space.factor(), op.form_on_h());
            let eig = linalg::hermitian_eigen(&reduced);
            let right = linalg::lower_adjoint_solve(space.factor(), &eig.vectors);
            let left = linalg::ad_mul(&eig.vectors, &space.factor().adjoint());
            Kind::Spectral {
                values: eig.values,
                right,
                left,
            }
        } else {
            Kind::General(op.matrix().clone())
        };
        Self { space, kind }
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    /// Eigenvalues of `A` when it is self-adjoint.
    pub fn spectrum(&self) -> Option<&[f64]> {
        match &self.kind {
            Kind::Spectral { values, .. } => Some(values),
            Kind::General(_) => None,
        }
    }

    pub fn at(&self, t: f64) -> Result<CMatrix> {
        if !(t >= 0.0) {
            return Err(FormError::InvalidParameter(format!(
                "semigroup time must be >= 0, got {t}"
            )));
        }
        Ok(match &self.kind {
            Kind::Spectral { values, right, left } => {
                let mut scaled = right.clone();
                for (k, mut col) in scaled.column_iter_mut().enumerate() {
                    col *= linalg::re((-t * values[k]).exp());
                }
                linalg::mul(&scaled, left)
            }
            Kind::General(a) => linalg::expm(&(a * linalg::re(-t))),
        })
    }

    /// Spectral factors `(λ, R, L)` with `e^{-tA} = R diag(e^{-tλ}) L`.
    pub(crate) fn factors(&self) -> Option<(&[f64], &CMatrix, &CMatrix)> {
        match &self.kind {
            Kind::Spectral { values, right, left } => Some((values, right, left)),
            Kind::General(_) => None,
        }
    }
}

/// `e^{-tA}`.
pub fn semigroup_at(op: &AssociatedOperator, t: f64) -> Result<CMatrix> {
    if !(t >= 0.0) {
        return Err(FormError::InvalidParameter(format!(
            "semigroup time must be >= 0, got {t}"
        )));
    }
    Semigroup::new(op).at(t)
}

/// `(λ + A)⁻¹` with the 1-norm condition estimate of `λ + A`.
#[derive(Debug, Clone)]
pub struct Resolvent {
    pub matrix: CMatrix,
    pub condition: f64,
}

pub fn resolvent(op: &AssociatedOperator, lambda: Complex64) -> Result<Resolvent> {
    let n = op.dim();
    let shifted = op.matrix() + CMatrix::identity(n, n) * lambda;
    match linalg::inverse_with_condition(&shifted) {
        Ok((matrix, condition)) => Ok(Resolvent { matrix, condition }),
        Err(condition) => Err(FormError::Singular {
            what: "lambda + A",
            condition,
        }),
    }
}

/// `‖R(λ) - R(ν) - (ν - λ) R(λ) R(ν)‖ / (‖R(λ)‖ + ‖R(ν)‖)`, norms in `H`.
pub fn resolvent_identity_residual(op: &AssociatedOperator, lambda: Complex64, nu: Complex64) -> Result<f64> {
    let h = op.space();
    let rl = resolvent(op, lambda)?.matrix;
    let rn = resolvent(op, nu)?.matrix;
    let residual = &rl - &rn - linalg::mul(&rl, &rn) * (nu - lambda);
    Ok(operator_norm(&residual, h, h) / (operator_norm(&rl, h, h) + operator_norm(&rn, h, h)))
}

/// Relative residual, in `H` operator norm, of
/// `R_μ(Aₙ) - R_μ(A₀) = (I + (λ-μ) R_μ(A₀)) (R_λ(Aₙ) - R_λ(A₀)) (I + (λ-μ) R_μ(Aₙ))`.
pub fn factorization_identity_residual(
    a0: &AssociatedOperator,
    an: &AssociatedOperator,
    lambda: Complex64,
    mu: Complex64,
) -> Result<f64> {
    let h = a0.space();
    if !h.same_as(an.space(), 1e-12) {
        return Err(FormError::Dimension("operators act on different spaces".into()));
    }
    let n = h.dim();
    let id = CMatrix::identity(n, n);
    let rm0 = resolvent(a0, mu)?.matrix;
    let rmn = resolvent(an, mu)?.matrix;
    let rl0 = resolvent(a0, lambda)?.matrix;
    let rln = resolvent(an, lambda)?.matrix;
    let lhs = &rmn - &rm0;
    let rhs = (&id + &rm0 * (lambda - mu)) * (&rln - &rl0) * (&id + &rmn * (lambda - mu));
    let scale = operator_norm(&lhs, h, h).max(f64::MIN_POSITIVE);
    Ok(operator_norm(&(lhs - rhs), h, h) / scale)
}

/// `X ≤ Y` for operators self-adjoint on `space`: the smallest eigenvalue of
/// `Y - X` is at least `-tol (1 + ‖Y - X‖)`.
pub fn psd_order(x: &CMatrix, y: &CMatrix, space: &InnerProductSpace, tol: f64) -> Result<bool> {
    Ok(psd_order_margin(x, y, space)? >= -tol * (1.0 + operator_norm(&(y - x), space, space)))
}

/// Smallest eigenvalue of `Y - X` on `space` (self-adjoint inputs only).
pub fn psd_order_margin(x: &CMatrix, y: &CMatrix, space: &InnerProductSpace) -> Result<f64> {
    for m in [x, y] {
        if !linalg::is_hermitian(&(space.gram() * m), 1e-10) {
            return Err(FormError::NotHermitian("operator with respect to the Gram matrix"));
        }
    }
    let diff = linalg::hermitian_part(&(space.gram() * (y - x)));
    linalg::min_generalized_eigenvalue(&diff, space.gram())
}
