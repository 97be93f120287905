//! The decomposition `V = V(a) ⊕ Ker j` and the operator associated with `(a, j)`.
//!
//! `V(a)` is represented by a lift `B: H -> V` with `J B = I`, whose columns
//! span `V(a)`. Writing `S_a = B* S B` (the form carried over to `H`), the
//! associated operator is `A = G_H^{-1} S_a`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ellipticity::{check_j_ellipticity, kernel_check, KernelCheck};
use super::{FormPair, SesquilinearForm};
use crate::error::{FormError, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::space::{InnerProductSpace, Subspace};

/// Relative singular-value cutoff for `K* C K` when lifting through `j`.
const LIFT_TOL: f64 = 1e-10;

/// Seed of the sampling stage of [`parabola_bound`].
pub const PARABOLA_SEED: u64 = 0x5EED;
const PARABOLA_SAMPLES: usize = 10_000;
const PARABOLA_RESTARTS: usize = 8;

/// Euclidean-orthonormal basis of `Ker j` (zero columns when `j` is injective).
pub fn kernel_of_j(pair: &FormPair) -> CMatrix {
    if pair.is_classical() {
        return CMatrix::zeros(pair.source().dim(), 0);
    }
    linalg::null_space_full_row_rank(pair.j())
}

/// Computes `B = R - K (K* C K)^{-1} K* C R` with `R` the minimum-norm right
/// inverse of `J`. On failure returns a nonzero vector of `Ker j` annihilated
/// by `K* C`, i.e. an element of `V(c) ∩ Ker j`.
pub(crate) fn lift_through(c: &CMatrix, j: &CMatrix, kernel: &CMatrix) -> std::result::Result<CMatrix, CVector> {
    if j.is_square() {
        return Ok(linalg::inverse(j).expect("j has full rank"));
    }
    let jjt = linalg::mul(j, &j.adjoint());
    let right_inverse = linalg::mul(&j.adjoint(), &linalg::inverse(&jjt).expect("j has full row rank"));
    if kernel.ncols() == 0 {
        return Ok(right_inverse);
    }
    let kck = linalg::mul(&linalg::ad_mul(kernel, c), kernel);
    let svd = kck.clone().svd(false, true);
    let (imin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let scale = linalg::spectral_norm(c).max(f64::MIN_POSITIVE);
    if smin <= LIFT_TOL * scale {
        let v_t = svd.v_t.expect("requested");
        let y: CVector = v_t.row(imin).adjoint();
        let mut w: CVector = kernel * y;
        w /= re_norm(&w);
        linalg::normalize_phase(&mut w);
        return Err(w);
    }
    let rhs = linalg::mul(&linalg::ad_mul(kernel, c), &right_inverse);
    let y = linalg::solve(&kck, &rhs).expect("K* C K checked nonsingular");
    Ok(right_inverse - linalg::mul(kernel, &y))
}

fn re_norm(v: &CVector) -> Complex64 {
    linalg::re(v.norm())
}

fn ensure_elliptic_on_kernel(pair: &FormPair, kernel: &CMatrix) -> Result<()> {
    let p = linalg::hermitian_part(pair.form().matrix());
    match kernel_check(&p, pair.source().gram(), kernel) {
        KernelCheck::Degenerate { witness, re_form } => Err(FormError::NotElliptic { witness, re_form }),
        _ => Ok(()),
    }
}

/// The lift `B` (`dim V x dim H`, `J B = I`) whose columns span `V(a)`.
pub fn va_lift(pair: &FormPair) -> Result<CMatrix> {
    let kernel = kernel_of_j(pair);
    ensure_elliptic_on_kernel(pair, &kernel)?;
    lift_through(pair.form().matrix(), pair.j(), &kernel).map_err(|witness| {
        let re_form = pair.form().eval(&witness, &witness).re;
        FormError::NotElliptic { witness, re_form }
    })
}

/// `V(a) = {u : a(u, v) = 0 for all v in Ker j}` as a `V`-orthonormal subspace.
pub fn compute_va(pair: &FormPair) -> Result<Subspace> {
    let lift = va_lift(pair)?;
    Subspace::new(pair.source().clone(), &lift)
}

/// The operator `A` on `H` associated with an elliptic pair, with provenance.
#[derive(Debug, Clone)]
pub struct AssociatedOperator {
    space: InnerProductSpace,
    matrix: CMatrix,
    origin: Arc<FormPair>,
    form_on_h: CMatrix,
    lift: CMatrix,
}

pub fn associated_operator(pair: &FormPair) -> Result<AssociatedOperator> {
    let lift = va_lift(pair)?;
    let form_on_h = linalg::mul(&linalg::ad_mul(&lift, pair.form().matrix()), &lift);
    let form_on_h = if pair.is_symmetric() {
        linalg::hermitian_part(&form_on_h)
    } else {
        form_on_h
    };
    let space = pair.target().clone();
    let matrix = space.solve_gram(&form_on_h);
    Ok(AssociatedOperator {
        space,
        matrix,
        origin: Arc::new(pair.clone()),
        form_on_h,
        lift,
    })
}

impl AssociatedOperator {
    /// Operator given directly by its matrix on `space`; the origin is the
    /// classical pair with form matrix `G A` and `j = I`.
    pub fn from_matrix(space: InnerProductSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.dim();
        if matrix.shape() != (n, n) {
            return Err(FormError::Dimension(format!(
                "operator is {}x{}, space has dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let form_on_h = space.gram() * &matrix;
        let symmetric = linalg::is_hermitian(&form_on_h, 1e-12) || form_on_h.norm() == 0.0;
        let form_on_h = if symmetric {
            linalg::hermitian_part(&form_on_h)
        } else {
            form_on_h
        };
        let form = if symmetric {
            SesquilinearForm::symmetric(space.clone(), form_on_h.clone())?
        } else {
            SesquilinearForm::new(space.clone(), form_on_h.clone())?
        };
        let origin = FormPair::new(form, CMatrix::identity(n, n), space.clone())?;
        Ok(Self {
            space,
            matrix,
            origin: Arc::new(origin),
            form_on_h,
            lift: CMatrix::identity(n, n),
        })
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn origin(&self) -> &FormPair {
        &self.origin
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `S_a = B* S B`, so that `a(Bx, By) = y* S_a x = ⟨Ax, y⟩_H`.
    pub fn form_on_h(&self) -> &CMatrix {
        &self.form_on_h
    }

    /// The lift `B: H -> V(a)`.
    pub fn lift(&self) -> &CMatrix {
        &self.lift
    }

    pub fn is_symmetric(&self) -> bool {
        self.origin.is_symmetric()
    }

    /// Gram-weighted adjoint `G^{-1} A* G`.
    pub fn adjoint(&self) -> CMatrix {
        self.space.adjoint_of(&self.matrix)
    }

    /// `‖G A - A* G‖ / ‖G A‖`.
    pub fn self_adjointness_defect(&self) -> f64 {
        let ga = linalg::mul(self.space.gram(), &self.matrix);
        let scale = ga.norm().max(f64::MIN_POSITIVE);
        (&ga - ga.adjoint()).norm() / scale
    }

    /// `inf Re⟨Ax, x⟩_H / ‖x‖²_H`: the numerical range lies in `Re z ≥` this value.
    pub fn numerical_range_floor(&self) -> f64 {
        linalg::min_generalized_eigenvalue(&linalg::hermitian_part(&self.form_on_h), self.space.gram())
            .expect("H Gram is positive definite")
    }

    /// Relative residual of the defining identity `J* G_H A = S B` on all basis vectors.
    pub fn defining_identity_residual(&self) -> f64 {
        let pair = &self.origin;
        let lhs = linalg::mul(&linalg::ad_mul(pair.j(), pair.target().gram()), &self.matrix);
        let rhs = linalg::mul(pair.form().matrix(), &self.lift);
        let scale = rhs.norm().max(lhs.norm()).max(f64::MIN_POSITIVE);
        (lhs - rhs).norm() / scale
    }

    /// Eigenvalues of `A` (complex, unsorted) from a Schur decomposition.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let schur = self.matrix.clone().schur();
        let (_, t) = schur.unpack();
        t.diagonal().iter().copied().collect()
    }
}

/// `φ(x) = min { a(u, u) : j u = x }` for a symmetric elliptic pair.
///
/// The minimum is computed directly over the affine fibre `u = J⁺x + K y`,
/// independently of the associated operator.
pub fn phi_functional(pair: &FormPair, x: &CVector) -> Result<f64> {
    let probes = CMatrix::from_column_slice(x.len(), 1, x.as_slice());
    Ok(phi_functional_batch(pair, &probes)?[0])
}

/// [`phi_functional`] for every column of `probes`.
pub fn phi_functional_batch(pair: &FormPair, probes: &CMatrix) -> Result<Vec<f64>> {
    if !pair.is_symmetric() {
        return Err(FormError::NotSymmetric);
    }
    if probes.nrows() != pair.target().dim() {
        return Err(FormError::Dimension(format!(
            "probes have length {}, H has dimension {}",
            probes.nrows(),
            pair.target().dim()
        )));
    }
    let s = pair.form().matrix();
    let j = pair.j();
    let u = if pair.is_classical() {
        linalg::solve(j, probes).expect("j is invertible")
    } else {
        let kernel = kernel_of_j(pair);
        ensure_elliptic_on_kernel(pair, &kernel)?;
        let jjt = j * j.adjoint();
        let particular = j.adjoint() * linalg::solve(&jjt, probes).expect("j has full row rank");
        let kk = kernel.adjoint() * s * &kernel;
        let rhs = -(kernel.adjoint() * s * &particular);
        let y = linalg::solve(&kk, &rhs).ok_or(FormError::Singular {
            what: "form restricted to Ker j",
            condition: f64::INFINITY,
        })?;
        particular + &kernel * y
    };
    let su = s * &u;
    Ok((0..u.ncols()).map(|c| u.column(c).dotc(&su.column(c)).re).collect())
}

/// `M = sup |Im a(u,u)| / (‖u‖_V ‖ju‖_H)` over `u ∈ V(a) \ {0}`.
///
/// Seeded sampling of the unit sphere followed by gradient ascent from the
/// best samples. Returns exactly 0 for symmetric forms.
pub fn parabola_bound(pair: &FormPair) -> Result<f64> {
    let lift = va_lift(pair)?;
    if pair.is_symmetric() {
        return Ok(0.0);
    }
    let sa = linalg::mul(&linalg::ad_mul(&lift, pair.form().matrix()), &lift);
    let q = linalg::skew_part(&sa);
    if q.norm() == 0.0 {
        return Ok(0.0);
    }
    let w = linalg::hermitian_part(&linalg::mul(&linalg::ad_mul(&lift, pair.source().gram()), &lift));
    let h = pair.target().gram().clone();
    let ratio = ParabolaRatio { q, w, h };

    let dim = pair.target().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(PARABOLA_SEED);
    let mut scored: Vec<(f64, CVector)> = (0..PARABOLA_SAMPLES)
        .map(|_| {
            let x = CVector::from_fn(dim, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            });
            (ratio.value(&x), x)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].0;
    for (_, start) in scored.into_iter().take(PARABOLA_RESTARTS) {
        best = best.max(ratio.ascend(start));
    }
    Ok(best)
}

struct ParabolaRatio {
    q: CMatrix,
    w: CMatrix,
    h: CMatrix,
}

impl ParabolaRatio {
    fn parts(&self, x: &CVector) -> (f64, f64, f64) {
        let q = x.dotc(&(&self.q * x)).re;
        let w = x.dotc(&(&self.w * x)).re;
        let h = x.dotc(&(&self.h * x)).re;
        (q, w, h)
    }

    fn value(&self, x: &CVector) -> f64 {
        let (q, w, h) = self.parts(x);
        if w <= 0.0 || h <= 0.0 {
            return 0.0;
        }
        q.abs() / (w * h).sqrt()
    }

    /// Ascent on `log f` with backtracking; `f` is scale invariant so iterates
    /// are renormalized each step.
    fn ascend(&self, mut x: CVector) -> f64 {
        x /= linalg::re(x.norm());
        let mut f = self.value(&x);
        let mut step = 1.0;
        for _ in 0..500 {
            let (q, w, h) = self.parts(&x);
            if q == 0.0 {
                break;
            }
            let grad: CVector = &self.q * &x / linalg::re(q)
                - &self.w * &x / linalg::re(w) * linalg::re(0.5)
                - &self.h * &x / linalg::re(h) * linalg::re(0.5);
            // Remove the radial component, which does not change f.
            let radial = x.dotc(&grad);
            let grad = grad - &x * radial;
            let gnorm = grad.norm();
            if gnorm < 1e-14 {
                break;
            }
            let mut improved = false;
            while step > 1e-16 {
                let mut trial = &x + &grad * linalg::re(step / gnorm);
                trial /= linalg::re(trial.norm());
                let ft = self.value(&trial);
                if ft > f {
                    let gain = ft - f;
                    x = trial;
                    f = ft;
                    step *= 2.0;
                    improved = gain > 1e-15 * f;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        f
    }
}

/// Parabola data of the numerical range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parabola {
    /// `sup |Im a(u,u)| / (‖u‖_V ‖ju‖_H)`.
    pub m: f64,
    pub omega: f64,
    pub mu: f64,
    /// `M² / μ`, the opening of the parabola around the numerical range.
    pub width: f64,
}

pub fn parabola_parameters(pair: &FormPair) -> Result<Parabola> {
    let cert = check_j_ellipticity(pair).into_result()?;
    let m = parabola_bound(pair)?;
    Ok(Parabola {
        m,
        omega: cert.omega,
        mu: cert.mu,
        width: m * m / cert.mu,
    })
}
