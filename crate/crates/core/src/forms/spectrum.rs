//! Min-max eigenvalues of symmetric pairs and the comparison of spectra
//! across different reference spaces.

use super::operator::{compute_va, kernel_of_j, AssociatedOperator};
use super::FormPair;
use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix, CVector, DEFAULT_PSD_TOL};

/// Slack allowed in `λ_k(A₁) ≤ λ_k(A₂)`.
pub const COMPARISON_SLACK: f64 = 1e-9;

/// The `k` smallest eigenvalues of the operator associated with a symmetric pair,
/// from the Rayleigh quotient `a(u,u) / ‖ju‖²_H` on `V(a)`.
pub fn minimax_eigenvalues(pair: &FormPair, kmax: usize) -> Result<Vec<f64>> {
    if !pair.is_symmetric() {
        return Err(FormError::NotSymmetric);
    }
    let dim_h = pair.target().dim();
    if kmax > dim_h {
        return Err(FormError::InvalidParameter(format!(
            "kmax = {kmax} exceeds dim H = {dim_h}"
        )));
    }
    let va = compute_va(pair)?;
    let q = va.basis();
    let stiffness = linalg::mul(&linalg::ad_mul(q, pair.form().matrix()), q);
    let jq = pair.j() * q;
    let metric = linalg::mul(&linalg::ad_mul(&jq, pair.target().gram()), &jq);
    let eig = linalg::generalized_eigen(&stiffness, &metric)?;
    Ok(eig.values.into_iter().take(kmax).collect())
}

/// Real parts of the eigenvalues of `A`, ascending, from a Schur decomposition
/// of the raw matrix (no use of the form or of `V(a)`).
pub fn direct_eigenvalues(op: &AssociatedOperator) -> Vec<f64> {
    let mut values: Vec<f64> = op.eigenvalues().iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `V₂ ⊂ V₁` given by the coordinates of a basis of `V₂` in `V₁`
/// (a `dim V₁ x dim V₂` matrix of full column rank).
#[derive(Debug, Clone)]
pub struct Inclusion {
    matrix: CMatrix,
}

impl Inclusion {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if linalg::numerical_rank(&matrix, 1e-10) < matrix.ncols() {
            return Err(FormError::RankDeficient("inclusion map"));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    /// `λ_k(A₁)`, `k = 1..=kmax`; `+∞` past `dim H₁`.
    pub lambda_1: Vec<f64>,
    /// `λ_k(A₂)`, `k = 1..=kmax`; `+∞` past `dim H₂`.
    pub lambda_2: Vec<f64>,
    /// Indices `k` (1-based) with `λ_k(A₁) > λ_k(A₂) + 1e-9`.
    pub violations: Vec<usize>,
}

impl ComparisonReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn padded(pair: &FormPair, kmax: usize) -> Result<Vec<f64>> {
    let available = kmax.min(pair.target().dim());
    let mut values = minimax_eigenvalues(pair, available)?;
    values.resize(kmax, f64::INFINITY);
    Ok(values)
}

/// PSD check of a Hermitian matrix; on failure returns the eigenvector of the
/// most negative eigenvalue.
fn psd_witness(m: &CMatrix) -> Option<CVector> {
    let eig = linalg::hermitian_eigen(m);
    let scale = 1.0 + eig.values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if eig.values[0] >= -DEFAULT_PSD_TOL * scale {
        None
    } else {
        Some(eig.vectors.column(0).into_owned())
    }
}

/// Checks the comparison hypotheses for `p2` on `V₂ ⊂ V₁` against `p1` and
/// compares `λ_k(A₁) ≤ λ_k(A₂)` for `k ≤ kmax`.
///
/// Hypotheses: `Ker j₁ ⊂ V₂`, `‖j₁u‖ ≥ ‖j₂u‖` and `a₁(u,u) ≤ a₂(u,u)` on `V₂`.
/// A failed hypothesis yields `HypothesisViolated` with a witness in `V₂`
/// coordinates (or in `V₁` coordinates for the kernel condition).
pub fn eigenvalue_domination(
    p1: &FormPair,
    p2: &FormPair,
    inclusion: &Inclusion,
    kmax: usize,
) -> Result<ComparisonReport> {
    if !p1.is_symmetric() || !p2.is_symmetric() {
        return Err(FormError::NotSymmetric);
    }
    let e = inclusion.matrix();
    if e.nrows() != p1.source().dim() || e.ncols() != p2.source().dim() {
        return Err(FormError::Dimension(format!(
            "inclusion is {}x{}, expected {}x{}",
            e.nrows(),
            e.ncols(),
            p1.source().dim(),
            p2.source().dim()
        )));
    }

    let kernel = kernel_of_j(p1);
    if kernel.ncols() > 0 {
        // Component of each kernel vector orthogonal (Euclidean) to range(E).
        let coeffs = linalg::solve(&(e.adjoint() * e), &(e.adjoint() * &kernel)).expect("E has full column rank");
        let residual = &kernel - e * coeffs;
        let eig = linalg::hermitian_eigen(&(residual.adjoint() * &residual));
        let worst = *eig.values.last().expect("non-empty kernel");
        if worst.sqrt() > 1e-10 {
            let witness = &kernel * eig.vectors.column(eig.values.len() - 1);
            return Err(FormError::HypothesisViolated {
                reason: "Ker j1 is not contained in V2".into(),
                witness,
            });
        }
    }

    let j1e = p1.j() * e;
    let norm_gap = linalg::hermitian_part(
        &(linalg::mul(&linalg::ad_mul(&j1e, p1.target().gram()), &j1e)
            - linalg::mul(&linalg::ad_mul(p2.j(), p2.target().gram()), p2.j())),
    );
    if let Some(witness) = psd_witness(&norm_gap) {
        return Err(FormError::HypothesisViolated {
            reason: "|j1 u| >= |j2 u| fails on V2".into(),
            witness,
        });
    }

    let form_gap =
        linalg::hermitian_part(&(p2.form().matrix() - linalg::mul(&linalg::ad_mul(e, p1.form().matrix()), e)));
    if let Some(witness) = psd_witness(&form_gap) {
        return Err(FormError::HypothesisViolated {
            reason: "a1(u,u) <= a2(u,u) fails on V2".into(),
            witness,
        });
    }

    let lambda_1 = padded(p1, kmax)?;
    let lambda_2 = padded(p2, kmax)?;
    let violations = lambda_1
        .iter()
        .zip(&lambda_2)
        .enumerate()
        .filter(|(_, (l1, l2))| **l1 > **l2 + COMPARISON_SLACK)
        .map(|(k, _)| k + 1)
        .collect();
    Ok(ComparisonReport {
        lambda_1,
        lambda_2,
        violations,
    })
}
