//! Sesquilinear forms, form pairs `(a, j)` and the structural operations on them.
//!
//! Convention: a form on `V` is stored as a square matrix `S` with
//! `a(u, v) = v* S u`, linear in the first slot. The map `j: V -> H` is a
//! `dim H x dim V` matrix `J`.

mod domination;
mod ehrling;
mod ellipticity;
mod operator;
mod spectrum;

pub use domination::{check_domination, DominationReport, GammaCheck};
pub use ehrling::{ehrling_constant, EhrlingConstant};
pub use ellipticity::{
    check_j_ellipticity, coercivity_at, perturbed_ellipticity, Ellipticity, EllipticityCertificate, PerturbationMode,
    PerturbationOutcome,
};
pub use operator::{
    associated_operator, compute_va, kernel_of_j, parabola_bound, parabola_parameters, phi_functional,
    phi_functional_batch, va_lift, AssociatedOperator, Parabola,
};
pub use spectrum::{direct_eigenvalues, eigenvalue_domination, minimax_eigenvalues, ComparisonReport, Inclusion};

use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::space::InnerProductSpace;

/// A bounded sesquilinear form on a finite-dimensional space `V`.
#[derive(Debug, Clone)]
pub struct SesquilinearForm {
    space: InnerProductSpace,
    matrix: CMatrix,
    symmetric: bool,
}

impl SesquilinearForm {
    /// A form with no symmetry claim.
    pub fn new(space: InnerProductSpace, matrix: CMatrix) -> Result<Self> {
        Self::check_size(&space, &matrix)?;
        Ok(Self {
            space,
            matrix,
            symmetric: false,
        })
    }

    /// A symmetric form, `a(u, v) = conj(a(v, u))`. The matrix is checked to be
    /// Hermitian within `1e-12` relative and then symmetrized.
    pub fn symmetric(space: InnerProductSpace, matrix: CMatrix) -> Result<Self> {
        Self::check_size(&space, &matrix)?;
        if !linalg::is_hermitian(&matrix, 1e-12) && matrix.norm() > 0.0 {
            return Err(FormError::NotHermitian("symmetric form matrix"));
        }
        Ok(Self {
            space,
            matrix: linalg::hermitian_part(&matrix),
            symmetric: true,
        })
    }

    /// Flags the form symmetric when its matrix is Hermitian.
    pub fn detect(space: InnerProductSpace, matrix: CMatrix) -> Result<Self> {
        if linalg::is_hermitian(&matrix, 1e-12) || matrix.norm() == 0.0 {
            Self::symmetric(space, matrix)
        } else {
            Self::new(space, matrix)
        }
    }

    fn check_size(space: &InnerProductSpace, matrix: &CMatrix) -> Result<()> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(FormError::Dimension(format!(
                "form matrix is {}x{} but V has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        Ok(())
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `a(u, v) = v* S u`.
    pub fn eval(&self, u: &CVector, v: &CVector) -> num_complex::Complex64 {
        (v.adjoint() * &self.matrix * u)[(0, 0)]
    }

    /// Sum of two forms on the same space.
    pub fn plus(&self, other: &SesquilinearForm) -> Result<SesquilinearForm> {
        if !self.space.same_as(&other.space, 1e-12) {
            return Err(FormError::Dimension("forms live on different spaces".into()));
        }
        let matrix = &self.matrix + &other.matrix;
        if self.symmetric && other.symmetric {
            Self::symmetric(self.space.clone(), matrix)
        } else {
            Self::new(self.space.clone(), matrix)
        }
    }
}

/// The pair `(a, j)` with `j: V -> H` of full row rank.
#[derive(Debug, Clone)]
pub struct FormPair {
    form: SesquilinearForm,
    j: CMatrix,
    target: InnerProductSpace,
}

/// Relative singular-value cutoff for the full-row-rank requirement on `J`.
pub const RANK_TOL: f64 = 1e-10;

impl FormPair {
    pub fn new(form: SesquilinearForm, j: CMatrix, target: InnerProductSpace) -> Result<Self> {
        let (h, v) = (target.dim(), form.space().dim());
        if j.nrows() != h || j.ncols() != v {
            return Err(FormError::Dimension(format!(
                "j is {}x{}, expected {}x{} (dim H x dim V)",
                j.nrows(),
                j.ncols(),
                h,
                v
            )));
        }
        if h > v {
            return Err(FormError::InvalidPair(format!(
                "dim H = {h} exceeds dim V = {v}; j cannot have dense range"
            )));
        }
        if linalg::numerical_rank(&j, RANK_TOL) < h {
            return Err(FormError::InvalidPair(
                "j does not have full row rank (range not dense)".into(),
            ));
        }
        Ok(Self { form, j, target })
    }

    /// Classical pair on `H` itself: `V = H` with the given form, `j = I`.
    pub fn classical(space: InnerProductSpace, form_matrix: CMatrix) -> Result<Self> {
        let n = space.dim();
        let form = SesquilinearForm::detect(space.clone(), form_matrix)?;
        Self::new(form, CMatrix::identity(n, n), space)
    }

    pub fn form(&self) -> &SesquilinearForm {
        &self.form
    }

    pub fn j(&self) -> &CMatrix {
        &self.j
    }

    pub fn source(&self) -> &InnerProductSpace {
        self.form.space()
    }

    pub fn target(&self) -> &InnerProductSpace {
        &self.target
    }

    pub fn is_symmetric(&self) -> bool {
        self.form.is_symmetric()
    }

    /// `j` is injective (square and full rank here).
    pub fn is_classical(&self) -> bool {
        self.j.nrows() == self.j.ncols()
    }

    /// Same `j` and spaces, different form.
    pub fn with_form(&self, form: SesquilinearForm) -> Result<Self> {
        Self::new(form, self.j.clone(), self.target.clone())
    }

    /// `J* G_H J`, the pull-back of the `H` inner product to `V`.
    pub fn pulled_back_gram(&self) -> CMatrix {
        linalg::hermitian_part(&linalg::mul(&linalg::ad_mul(&self.j, self.target.gram()), &self.j))
    }
}
