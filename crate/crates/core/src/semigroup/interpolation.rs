use super::schatten_norm;
use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix};
use crate::space::InnerProductSpace;

/// The complex interpolation space `[H̃, H]_θ` on common coordinates.
///
/// With `Λ > 0` defined by `‖u‖_{H̃} = ‖Λu‖_H`, the norm of `H_θ` is
/// `‖Λ^{1-θ} u‖_H`, so `θ = 0` gives `H̃` and `θ = 1` gives `H`.
#[derive(Debug, Clone)]
pub struct InterpolatedSpace {
    pub theta: f64,
    pub base: InnerProductSpace,
    pub fine: InnerProductSpace,
    pub gram_theta: CMatrix,
}

impl InterpolatedSpace {
    pub fn space(&self) -> Result<InnerProductSpace> {
        InnerProductSpace::new(self.gram_theta.clone())
    }
}

pub fn interpolation_space(
    base: &InnerProductSpace,
    fine: &InnerProductSpace,
    theta: f64,
) -> Result<InterpolatedSpace> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(FormError::InvalidParameter(format!(
            "theta must lie in [0, 1], got {theta}"
        )));
    }
    if base.dim() != fine.dim() {
        return Err(FormError::Dimension(format!(
            "base has dimension {}, fine has dimension {}",
            base.dim(),
            fine.dim()
        )));
    }
    // In base-orthonormal coordinates the fine Gram is Λ².
    let l = base.factor();
    let lambda_sq = linalg::congruence_inv(l, fine.gram());
    let eig = linalg::hermitian_eigen(&lambda_sq);
    let top = eig.values.last().copied().unwrap_or(0.0);
    if eig.values[0] <= 1e-14 * top {
        return Err(FormError::NotPositiveDefinite("Λ (fine Gram relative to base Gram)"));
    }
    let power = linalg::hermitian_function(&lambda_sq, |x| x.powf(1.0 - theta));
    let gram_theta = linalg::hermitian_part(&(l * power * l.adjoint()));
    Ok(InterpolatedSpace {
        theta,
        base: base.clone(),
        fine: fine.clone(),
        gram_theta,
    })
}

/// The constant `C` that makes
/// `‖D‖_{L_q(H, H_θ)} = C ‖D‖_{L_1(H, H̃)}^θ ‖D‖_{L_p(H)}^{1-θ}` with
/// `1/q = θ/p + (1 - θ)`. Returns 0 for `D = 0`.
pub fn three_factor_constant(
    d: &CMatrix,
    base: &InnerProductSpace,
    fine: &InnerProductSpace,
    theta: f64,
    p: f64,
) -> Result<f64> {
    let q = 1.0 / (theta / p + (1.0 - theta));
    let h_theta = interpolation_space(base, fine, theta)?.space()?;
    let lhs = schatten_norm(d, q, base, &h_theta)?.value;
    if lhs == 0.0 {
        return Ok(0.0);
    }
    let trace_fine = schatten_norm(d, 1.0, base, fine)?.value;
    let p_norm = schatten_norm(d, p, base, base)?.value;
    Ok(lhs / (trace_fine.powf(theta) * p_norm.powf(1.0 - theta)))
}
