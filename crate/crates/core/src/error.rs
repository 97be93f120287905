use thiserror::Error;

use crate::linalg::CVector;

#[derive(Debug, Error)]
pub enum FormError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0} is not Hermitian")]
    NotHermitian(&'static str),

    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),

    #[error("{0} is rank deficient")]
    RankDeficient(&'static str),

    #[error("invalid form pair: {0}")]
    InvalidPair(String),

    #[error("form is not j-elliptic (Re a(u,u) = {re_form:.3e} on a unit kernel vector)")]
    NotElliptic { witness: CVector, re_form: f64 },

    #[error("operation requires a symmetric form")]
    NotSymmetric,

    #[error("{what} is singular (condition estimate {condition:.3e})")]
    Singular { what: &'static str, condition: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis violated: {reason}")]
    HypothesisViolated { reason: String, witness: CVector },
}

pub type Result<T> = std::result::Result<T, FormError>;
