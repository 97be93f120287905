//! Finite-dimensional Hilbert spaces given by a Gram matrix, and their subspaces.

use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix, CVector};

/// `ℂ^dim` with inner product `⟨u, v⟩ = v* G u`.
///
/// The lower Cholesky factor `L` (`G = L L*`) is cached; `L* u` are the
/// coordinates of `u` in an orthonormal frame.
#[derive(Debug, Clone)]
pub struct InnerProductSpace {
    gram: CMatrix,
    factor: CMatrix,
}

impl InnerProductSpace {
    pub fn new(gram: CMatrix) -> Result<Self> {
        if !gram.is_square() || gram.nrows() == 0 {
            return Err(FormError::Dimension(format!(
                "Gram matrix must be square and non-empty, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        if !linalg::is_hermitian(&gram, 1e-12) {
            return Err(FormError::NotHermitian("Gram matrix"));
        }
        let gram = linalg::hermitian_part(&gram);
        let factor = linalg::cholesky_lower(&gram).ok_or(FormError::NotPositiveDefinite("Gram matrix"))?;
        Ok(Self { gram, factor })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(CMatrix::identity(dim, dim)).expect("identity is a valid Gram matrix")
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// Lower Cholesky factor of the Gram matrix.
    pub fn factor(&self) -> &CMatrix {
        &self.factor
    }

    pub fn inner(&self, u: &CVector, v: &CVector) -> num_complex::Complex64 {
        (v.adjoint() * &self.gram * u)[(0, 0)]
    }

    pub fn norm(&self, u: &CVector) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    /// `L* T L^{-*}`: an operator on this space written in orthonormal coordinates.
    pub fn to_orthonormal(&self, op: &CMatrix) -> CMatrix {
        let left = linalg::ad_mul(&self.factor, op);
        linalg::lower_solve(&self.factor, &left.adjoint()).adjoint()
    }

    /// Inverse of [`Self::to_orthonormal`].
    pub fn from_orthonormal(&self, op: &CMatrix) -> CMatrix {
        let left = linalg::lower_adjoint_solve(&self.factor, op);
        left * self.factor.adjoint()
    }

    /// Gram-weighted adjoint `G^{-1} T* G` of an operator on this space.
    pub fn adjoint_of(&self, op: &CMatrix) -> CMatrix {
        let rhs = linalg::ad_mul(op, &self.gram);
        let tmp = linalg::lower_solve(&self.factor, &rhs);
        linalg::lower_adjoint_solve(&self.factor, &tmp)
    }

    /// Solves `G x = b`.
    pub fn solve_gram(&self, b: &CMatrix) -> CMatrix {
        let tmp = linalg::lower_solve(&self.factor, b);
        linalg::lower_adjoint_solve(&self.factor, &tmp)
    }

    pub fn same_as(&self, other: &InnerProductSpace, rel_tol: f64) -> bool {
        self.dim() == other.dim() && (&self.gram - &other.gram).norm() <= rel_tol * self.gram.norm()
    }
}

/// A subspace of an [`InnerProductSpace`] with a Gram-orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    parent: InnerProductSpace,
    basis: CMatrix,
}

impl Subspace {
    /// Orthonormalizes the columns of `spanning` with respect to the parent Gram.
    pub fn new(parent: InnerProductSpace, spanning: &CMatrix) -> Result<Self> {
        if spanning.nrows() != parent.dim() {
            return Err(FormError::Dimension(format!(
                "basis has {} rows, space has dimension {}",
                spanning.nrows(),
                parent.dim()
            )));
        }
        let basis = linalg::gram_orthonormalize(spanning, parent.gram())?;
        Ok(Self { parent, basis })
    }

    pub fn parent(&self) -> &InnerProductSpace {
        &self.parent
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Largest deviation of `B* G B` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.dim();
        linalg::max_abs_entry(&(self.basis.adjoint() * self.parent.gram() * &self.basis - CMatrix::identity(k, k)))
    }

    /// Orthogonal projection onto the subspace, as a matrix on the parent.
    pub fn projector(&self) -> CMatrix {
        linalg::mul(&linalg::mul(&self.basis, &self.basis.adjoint()), self.parent.gram())
    }
}
