//! `0 ≤ A ≤ B` without `e^{-B} ≤ e^{-A}`.

use crate::forms::FormPair;
use crate::linalg::{self, CMatrix};
use crate::space::InnerProductSpace;

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub a: CMatrix,
    pub b: CMatrix,
    /// Eigenvalues of `A`, ascending.
    pub eig_a: Vec<f64>,
    /// Eigenvalues of `B - A`, ascending.
    pub eig_b_minus_a: Vec<f64>,
    /// Smallest eigenvalue of `e^{-A} - e^{-B}`.
    pub semigroup_gap: f64,
    /// Smallest eigenvalue of `(1 + A)⁻¹ - (1 + B)⁻¹`.
    pub resolvent_gap: f64,
}

impl Counterexample {
    /// Classical pairs on Euclidean `ℂ²` whose operators are `A` and `B`.
    pub fn pairs(&self) -> (FormPair, FormPair) {
        let e = InnerProductSpace::euclidean(2);
        (
            FormPair::classical(e.clone(), self.a.clone()).expect("A is Hermitian"),
            FormPair::classical(e, self.b.clone()).expect("B is Hermitian"),
        )
    }
}

/// `A = [[2, 2], [2, 2]]`, `B = diag(3, 6)`.
pub fn counterexample_2x2() -> Counterexample {
    let a = CMatrix::from_row_slice(2, 2, &[2.0, 2.0, 2.0, 2.0].map(linalg::re));
    let b = linalg::real_diag(&[3.0, 6.0]);
    let exp_neg = |m: &CMatrix| linalg::hermitian_function(m, |x| (-x).exp());
    let resolvent = |m: &CMatrix| linalg::hermitian_function(m, |x| 1.0 / (1.0 + x));
    Counterexample {
        eig_a: linalg::hermitian_eigen(&a).values,
        eig_b_minus_a: linalg::hermitian_eigen(&(&b - &a)).values,
        semigroup_gap: linalg::min_eigenvalue(&(exp_neg(&a) - exp_neg(&b))),
        resolvent_gap: linalg::min_eigenvalue(&(resolvent(&a) - resolvent(&b))),
        a,
        b,
    }
}
