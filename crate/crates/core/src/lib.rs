//! A desk-scale laboratory for j-elliptic sesquilinear forms.
//!
//! Everything lives on finite-dimensional spaces with explicit Gram matrices:
//! a form `a` on `V`, a map `j: V -> H` with dense (here: full) range, and the
//! operator `A` on `H` associated with the pair. On top of that sit
//! semigroups, resolvents, Schatten norms and convergence experiments
//! ([`semigroup`]) and builders for interval and diagonal models ([`gallery`]).

pub mod error;
pub mod forms;
pub mod gallery;
pub mod linalg;
pub mod semigroup;
pub mod space;

pub use error::{FormError, Result};
pub use forms::{
    associated_operator, check_domination, check_j_ellipticity, compute_va, ehrling_constant, minimax_eigenvalues,
    AssociatedOperator, EllipticityCertificate, FormPair, SesquilinearForm,
};
pub use linalg::{CMatrix, CVector};
pub use space::{InnerProductSpace, Subspace};
