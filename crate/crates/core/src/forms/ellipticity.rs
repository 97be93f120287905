//! Certification of the fundamental inequality
//! `Re a(u,u) - ω |j u|²_H ≥ μ |u|²_V`.
//!
//! In finite dimension the inequality holds for some `(ω, μ)` exactly when the
//! Hermitian part of `a` is positive definite on `Ker j`. The search returns
//! `ω = 0` whenever that already works; otherwise the least negative `ω` at
//! which the optimal `μ(ω)` reaches half of what is attainable as `ω → -∞`.

use super::operator::kernel_of_j;
use super::{FormPair, SesquilinearForm};
use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Relative threshold below which coercivity on `Ker j` counts as lost.
const COERCIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityCertificate {
    pub omega: f64,
    pub mu: f64,
}

impl EllipticityCertificate {
    /// Smallest eigenvalue of `Herm(S) - ω J*G_H J - μ G_V`; the certificate is
    /// valid when this is above `-1e-12` times the matrix scale.
    pub fn psd_floor(&self, pair: &FormPair) -> f64 {
        let m = certificate_matrix(pair, self.omega, self.mu);
        linalg::min_eigenvalue(&m)
    }

    pub fn holds_for(&self, pair: &FormPair) -> bool {
        let m = certificate_matrix(pair, self.omega, self.mu);
        let scale = 1.0 + linalg::spectral_norm(&m);
        linalg::min_eigenvalue(&m) >= -1e-12 * scale
    }
}

fn certificate_matrix(pair: &FormPair, omega: f64, mu: f64) -> CMatrix {
    linalg::hermitian_part(pair.form().matrix())
        - pair.pulled_back_gram() * linalg::re(omega)
        - pair.source().gram() * linalg::re(mu)
}

#[derive(Debug, Clone)]
pub enum Ellipticity {
    Certified(EllipticityCertificate),
    /// `witness` lies in `Ker j`, has unit `V`-norm and `Re a(w, w) = re_form ≤ 0`
    /// up to the coercivity tolerance.
    NotElliptic {
        witness: CVector,
        re_form: f64,
    },
}

impl Ellipticity {
    pub fn certificate(&self) -> Option<EllipticityCertificate> {
        match self {
            Ellipticity::Certified(c) => Some(*c),
            Ellipticity::NotElliptic { .. } => None,
        }
    }

    pub fn into_result(self) -> Result<EllipticityCertificate> {
        match self {
            Ellipticity::Certified(c) => Ok(c),
            Ellipticity::NotElliptic { witness, re_form } => Err(FormError::NotElliptic { witness, re_form }),
        }
    }
}

pub(crate) enum KernelCheck {
    Empty,
    Coercive(f64),
    Degenerate { witness: CVector, re_form: f64 },
}

/// Smallest Rayleigh quotient of `Herm(a)` against the `V` Gram on `Ker j`.
pub(crate) fn kernel_check(p: &CMatrix, g: &CMatrix, kernel: &CMatrix) -> KernelCheck {
    if kernel.ncols() == 0 {
        return KernelCheck::Empty;
    }
    let kp = kernel.adjoint() * p * kernel;
    let kg = kernel.adjoint() * g * kernel;
    let eig = linalg::generalized_eigen(&kp, &kg).expect("restricted V Gram is positive definite");
    let scale = eig.values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mu_k = eig.values[0];
    if mu_k <= COERCIVITY_TOL * scale {
        let witness: CVector = kernel * eig.vectors.column(0);
        let re_form = (witness.adjoint() * p * &witness)[(0, 0)].re;
        KernelCheck::Degenerate { witness, re_form }
    } else {
        KernelCheck::Coercive(mu_k)
    }
}

/// `μ(ω)`: the largest `μ` for which the inequality holds at shift `ω`.
pub fn coercivity_at(pair: &FormPair, omega: f64) -> f64 {
    let p = linalg::hermitian_part(pair.form().matrix());
    let q = pair.pulled_back_gram();
    linalg::min_generalized_eigenvalue(&(p - q * linalg::re(omega)), pair.source().gram())
        .expect("V Gram is positive definite")
}

pub fn check_j_ellipticity(pair: &FormPair) -> Ellipticity {
    let kernel = kernel_of_j(pair);
    certify(
        &linalg::hermitian_part(pair.form().matrix()),
        &pair.pulled_back_gram(),
        pair.source().gram(),
        &kernel,
    )
}

/// Core search on raw matrices: `p` Hermitian part of the form, `q` the pulled
/// back `H` Gram, `g` the `V` Gram and `kernel` a basis of `Ker j`.
pub(crate) fn certify(p: &CMatrix, q: &CMatrix, g: &CMatrix, kernel: &CMatrix) -> Ellipticity {
    let mu_at = |omega: f64| {
        linalg::min_generalized_eigenvalue(&(p - q * linalg::re(omega)), g).expect("V Gram is positive definite")
    };
    let spectrum = linalg::generalized_eigen(p, g).expect("V Gram is positive definite");
    let scale = spectrum.values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));

    let kernel_mu = match kernel_check(p, g, kernel) {
        KernelCheck::Empty => f64::INFINITY,
        KernelCheck::Coercive(mu_k) => mu_k,
        KernelCheck::Degenerate { witness, re_form } => return Ellipticity::NotElliptic { witness, re_form },
    };

    let mu0 = mu_at(0.0);
    if mu0 > COERCIVITY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Ellipticity::Certified(EllipticityCertificate { omega: 0.0, mu: mu0 });
    }

    // μ(ω) is concave and non-increasing in ω with limit `kernel_mu` at -∞.
    let target = 0.5 * kernel_mu.min(scale.max(1.0));
    let mut hi = 0.0f64;
    let mut lo = -1.0f64;
    let mut mu_lo = mu_at(lo);
    let mut doublings = 0;
    while mu_lo < target {
        hi = lo;
        lo *= 2.0;
        mu_lo = mu_at(lo);
        doublings += 1;
        assert!(doublings < 400, "no finite shift reaches the coercivity target");
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let mu_mid = mu_at(mid);
        if mu_mid >= target {
            lo = mid;
            mu_lo = mu_mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= 1e-12 * lo.abs() {
            break;
        }
    }
    Ellipticity::Certified(EllipticityCertificate { omega: lo, mu: mu_lo })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationMode {
    /// Certify `a + b` on all of `V`.
    Full,
    /// Certify `a + b` only on `V(a + b)`, after checking that `j` is injective there.
    Restricted,
}

#[derive(Debug, Clone)]
pub enum PerturbationOutcome {
    Certified(EllipticityCertificate),
    /// Full mode: `Re (a+b)(w, w) ≤ 0` for a unit `w ∈ Ker j`.
    NotElliptic {
        witness: CVector,
        re_form: f64,
    },
    /// Restricted mode: `w ≠ 0` lies in `V(a+b) ∩ Ker j`.
    NotInjective {
        witness: CVector,
    },
}

impl PerturbationOutcome {
    pub fn certificate(&self) -> Option<EllipticityCertificate> {
        match self {
            PerturbationOutcome::Certified(c) => Some(*c),
            _ => None,
        }
    }
}

pub fn perturbed_ellipticity(
    pair: &FormPair,
    b: &SesquilinearForm,
    mode: PerturbationMode,
) -> Result<PerturbationOutcome> {
    if b.matrix().shape() != pair.form().matrix().shape() {
        return Err(FormError::Dimension("perturbation lives on a different space".into()));
    }
    let sum = pair.form().plus(b)?;
    let perturbed = pair.with_form(sum)?;
    let kernel = kernel_of_j(&perturbed);
    match mode {
        PerturbationMode::Full => Ok(match check_j_ellipticity(&perturbed) {
            Ellipticity::Certified(c) => PerturbationOutcome::Certified(c),
            Ellipticity::NotElliptic { witness, re_form } => PerturbationOutcome::NotElliptic { witness, re_form },
        }),
        PerturbationMode::Restricted => {
            let c = perturbed.form().matrix();
            let basis = match super::operator::lift_through(c, perturbed.j(), &kernel) {
                Ok(basis) => basis,
                Err(witness) => return Ok(PerturbationOutcome::NotInjective { witness }),
            };
            // j is injective on span(basis) since j * basis = I.
            let p = basis.adjoint() * linalg::hermitian_part(c) * &basis;
            let jq = perturbed.j() * &basis;
            let q = jq.adjoint() * perturbed.target().gram() * &jq;
            let g = basis.adjoint() * perturbed.source().gram() * &basis;
            let empty = CMatrix::zeros(basis.ncols(), 0);
            Ok(match certify(&p, &q, &g, &empty) {
                Ellipticity::Certified(c) => PerturbationOutcome::Certified(c),
                Ellipticity::NotElliptic { witness, re_form } => PerturbationOutcome::NotElliptic {
                    witness: &basis * witness,
                    re_form,
                },
            })
        }
    }
}
