use super::weighted;
use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix};
use crate::space::InnerProductSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct SchattenReport {
    pub p: f64,
    pub value: f64,
    /// Descending.
    pub singular_values: Vec<f64>,
}

impl SchattenReport {
    fn from_singular_values(p: f64, singular_values: Vec<f64>) -> Self {
        let value = lp_norm(&singular_values, p);
        Self {
            p,
            value,
            singular_values,
        }
    }

    /// The same singular values measured in another exponent.
    pub fn with_p(&self, p: f64) -> Self {
        Self::from_singular_values(p, self.singular_values.clone())
    }
}

/// `(Σ sᵖ)^{1/p}` evaluated with the largest entry factored out.
pub(crate) fn lp_norm(values: &[f64], p: f64) -> f64 {
    let top = values.iter().fold(0.0f64, |acc, &s| acc.max(s.abs()));
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    top * values
        .iter()
        .map(|s| (s.abs() / top).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Schatten `p`-norm of `T: src -> dst`.
///
/// The singular values are those of `L_dst* T L_src^{-*}` with `G = L L*` the
/// Cholesky factorizations; they coincide with those of
/// `G_dst^{1/2} T G_src^{-1/2}` because `G^{1/2} = L Q` for a unitary `Q`.
pub fn schatten_norm(t: &CMatrix, p: f64, src: &InnerProductSpace, dst: &InnerProductSpace) -> Result<SchattenReport> {
    if !(p >= 1.0) {
        return Err(FormError::InvalidParameter(format!(
            "Schatten exponent must be >= 1, got {p}"
        )));
    }
    if t.shape() != (dst.dim(), src.dim()) {
        return Err(FormError::Dimension(format!(
            "operator is {}x{}, spaces need {}x{}",
            t.nrows(),
            t.ncols(),
            dst.dim(),
            src.dim()
        )));
    }
    let singular_values = linalg::singular_values(&weighted(t, src, dst));
    Ok(SchattenReport::from_singular_values(p, singular_values))
}
