//! Dense complex linear algebra used throughout the crate.
//!
//! Everything is built on `nalgebra::DMatrix<Complex64>`. Hermitian eigenproblems
//! with a vanishing imaginary part are routed through the real symmetric solver,
//! which is several times faster for the large interval models.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{FormError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default relative floor for positive-semidefiniteness tests.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn from_real(m: &DMatrix<f64>) -> CMatrix {
    m.map(re)
}

pub fn real_diag(d: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| re(x))))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * re(0.5)
}

/// `(m - m*) / (2i)`, Hermitian; the "imaginary part" of a square matrix.
pub fn skew_part(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()) * Complex64::new(0.0, -0.5)
}

pub fn is_hermitian(m: &CMatrix, rel_tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).norm() <= rel_tol * m.norm().max(f64::MIN_POSITIVE)
}

fn max_imag(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

/// Real and imaginary parts; the latter is `None` when it vanishes exactly.
fn split(m: &CMatrix) -> (DMatrix<f64>, Option<DMatrix<f64>>) {
    let real = m.map(|z| z.re);
    let imag = (max_imag(m) > 0.0).then(|| m.map(|z| z.im));
    (real, imag)
}

fn join(real: DMatrix<f64>, imag: Option<DMatrix<f64>>) -> CMatrix {
    match imag {
        Some(imag) => real.zip_map(&imag, Complex64::new),
        None => from_real(&real),
    }
}

/// `a * b` through real products, which use the blocked kernel that nalgebra
/// reserves for real scalars.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let real = match (&ai, &bi) {
        (Some(ai), Some(bi)) => &ar * &br - ai * bi,
        _ => &ar * &br,
    };
    let imag = match (&ai, &bi) {
        (Some(ai), Some(bi)) => Some(&ar * bi + ai * &br),
        (Some(ai), None) => Some(ai * &br),
        (None, Some(bi)) => Some(&ar * bi),
        (None, None) => None,
    };
    join(real, imag)
}

/// `a* b`.
pub fn ad_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    mul(&a.adjoint(), b)
}

/// Applies a real-linear solver to each part of `b` when `m` is real.
fn solve_parts(
    m: &CMatrix,
    b: &CMatrix,
    real_solve: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> Option<DMatrix<f64>>,
) -> Option<Option<CMatrix>> {
    if max_imag(m) > 0.0 {
        return None;
    }
    let mr = m.map(|z| z.re);
    let (br, bi) = split(b);
    let real = real_solve(&mr, &br);
    let imag = bi.map(|bi| real_solve(&mr, &bi));
    Some(match (real, imag) {
        (Some(r), None) => Some(join(r, None)),
        (Some(r), Some(Some(i))) => Some(join(r, Some(i))),
        _ => None,
    })
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending; each eigenvector is scaled so that its first
/// non-negligible component is real and positive.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    let herm = hermitian_part(m);
    let (vals, vecs) = match raw_eigen(&herm) {
        Some(pair) => pair,
        None => {
            // The tridiagonal reduction can break down on exactly zero columns;
            // a fixed orthogonal change of basis removes them.
            let q = mixing_basis(n);
            let (vals, vecs) = raw_eigen(&mul(&ad_mul(&q, &herm), &q)).expect("eigensolver failed after rotation");
            (vals, mul(&q, &vecs))
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vecs.column(src).into_owned();
        normalize_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    HermitianEigen {
        values: order.iter().map(|&i| vals[i]).collect(),
        vectors,
    }
}

fn raw_eigen(herm: &CMatrix) -> Option<(Vec<f64>, CMatrix)> {
    let (vals, vecs): (Vec<f64>, CMatrix) = if max_imag(herm) == 0.0 {
        let eig = SymmetricEigen::new(herm.map(|z| z.re));
        (eig.eigenvalues.iter().copied().collect(), from_real(&eig.eigenvectors))
    } else {
        let eig = SymmetricEigen::new(herm.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let finite = vals.iter().all(|v| v.is_finite()) && vecs.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    finite.then_some((vals, vecs))
}

/// Orthogonal `Q` from the QR factorization of a fixed dense matrix.
fn mixing_basis(n: usize) -> CMatrix {
    let dense = DMatrix::from_fn(n, n, |i, j| {
        let x = ((i * 7919 + j * 104_729 + 13) % 1009) as f64 / 1009.0;
        x - 0.5 + if i == j { 2.0 } else { 0.0 }
    });
    from_real(&dense.qr().q())
}

/// Rotates `v` so that its first component above `1e-12 * |v|` is real positive.
pub fn normalize_phase(v: &mut CVector) {
    let scale = v.norm();
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12 * scale).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Lower-triangular Cholesky factor `L` with `m = L L*`.
pub fn cholesky_lower(m: &CMatrix) -> Option<CMatrix> {
    let herm = hermitian_part(m);
    if max_imag(&herm) == 0.0 {
        return nalgebra::Cholesky::new(herm.map(|z| z.re)).map(|c| from_real(&c.unpack()));
    }
    // The complex factorization takes square roots of negative pivots without
    // complaint; a pivot is valid only if its root is real and positive.
    let l = nalgebra::Cholesky::new(herm)?.unpack();
    l.diagonal()
        .iter()
        .all(|d| d.re > 0.0 && d.im.abs() <= 1e-12 * d.re)
        .then_some(l)
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn lower_solve(l: &CMatrix, b: &CMatrix) -> CMatrix {
    solve_parts(l, b, |l, b| l.solve_lower_triangular(b))
        .unwrap_or_else(|| l.solve_lower_triangular(b))
        .expect("triangular factor with zero diagonal")
}

/// Solves `L* X = B` for lower-triangular `L`.
pub fn lower_adjoint_solve(l: &CMatrix, b: &CMatrix) -> CMatrix {
    solve_parts(l, b, |l, b| l.tr_solve_lower_triangular(b))
        .unwrap_or_else(|| l.ad_solve_lower_triangular(b))
        .expect("triangular factor with zero diagonal")
}

/// `L^{-1} M L^{-*}`, the congruence that maps a form on a Gram space to
/// orthonormal coordinates.
pub fn congruence_inv(l: &CMatrix, m: &CMatrix) -> CMatrix {
    let left = lower_solve(l, m);
    let right = lower_solve(l, &left.adjoint());
    hermitian_part(&right.adjoint())
}

/// Generalized Hermitian eigenproblem `A x = λ B x` with `B` positive definite.
/// Returned eigenvectors are `B`-orthonormal.
pub fn generalized_eigen(a: &CMatrix, b: &CMatrix) -> Result<HermitianEigen> {
    let l = cholesky_lower(b).ok_or(FormError::NotPositiveDefinite("generalized eigenproblem metric"))?;
    let reduced = congruence_inv(&l, a);
    let eig = hermitian_eigen(&reduced);
    let mut vectors = lower_adjoint_solve(&l, &eig.vectors);
    for mut col in vectors.column_iter_mut() {
        let mut owned = col.clone_owned();
        normalize_phase(&mut owned);
        col.copy_from(&owned);
    }
    Ok(HermitianEigen {
        values: eig.values,
        vectors,
    })
}

pub fn min_generalized_eigenvalue(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let l = cholesky_lower(b).ok_or(FormError::NotPositiveDefinite("generalized eigenproblem metric"))?;
    let reduced = congruence_inv(&l, a);
    Ok(hermitian_eigen(&reduced)
        .values
        .first()
        .copied()
        .unwrap_or(f64::INFINITY))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = if max_imag(m) == 0.0 {
        m.map(|z| z.re).singular_values_unordered().iter().copied().collect()
    } else {
        m.singular_values_unordered().iter().copied().collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s.iter_mut().for_each(|x| *x = x.max(0.0));
    s
}

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Numerical rank by singular values relative to the largest one.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal (Euclidean) basis of the null space of a full-row-rank `m`.
///
/// Obtained from a Householder QR of `[m* | I]`: the trailing columns of the
/// full orthogonal factor complete the row space of `m`.
pub fn null_space_full_row_rank(m: &CMatrix) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows >= cols {
        return CMatrix::zeros(cols, 0);
    }
    let mut aug = CMatrix::zeros(cols, rows + cols);
    aug.view_mut((0, 0), (cols, rows)).copy_from(&m.adjoint());
    aug.view_mut((0, rows), (cols, cols)).fill_with_identity();
    let q = aug.qr().q();
    q.columns(rows, cols - rows).into_owned()
}

/// Orthonormal basis of the null space of an arbitrary matrix via its
/// Hermitian Gram `m* m`.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    let gram = ad_mul(m, m);
    let eig = hermitian_eigen(&gram);
    let top = eig.values.last().copied().unwrap_or(0.0).abs();
    let cut = rel_tol * top.max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..cols).filter(|&i| eig.values[i] <= cut).collect();
    let mut out = CMatrix::zeros(cols, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &eig.vectors.column(src));
    }
    out
}

/// Re-orthonormalizes the columns of `basis` with respect to `gram`.
pub fn gram_orthonormalize(basis: &CMatrix, gram: &CMatrix) -> Result<CMatrix> {
    if basis.ncols() == 0 {
        return Ok(basis.clone());
    }
    let inner = mul(&ad_mul(basis, gram), basis);
    let l = cholesky_lower(&inner).ok_or(FormError::RankDeficient("subspace basis"))?;
    // basis * L^{-*}
    Ok(lower_solve(&l, &basis.adjoint()).adjoint())
}

pub fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    solve_parts(a, b, |a, b| a.clone().lu().solve(b)).unwrap_or_else(|| a.clone().lu().solve(b))
}

pub fn inverse(a: &CMatrix) -> Option<CMatrix> {
    if max_imag(a) == 0.0 {
        return a.map(|z| z.re).try_inverse().map(|inv| from_real(&inv));
    }
    a.clone().try_inverse()
}

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse together with the 1-norm condition number.
pub fn inverse_with_condition(a: &CMatrix) -> std::result::Result<(CMatrix, f64), f64> {
    match a.clone().try_inverse() {
        Some(inv) => {
            let cond = one_norm(a) * one_norm(&inv);
            if cond.is_finite() && cond < 1e15 {
                Ok((inv, cond))
            } else {
                Err(cond)
            }
        }
        None => Err(f64::INFINITY),
    }
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).values.first().copied().unwrap_or(f64::INFINITY)
}

/// Positive-semidefiniteness with the floor `-tol * (1 + |m|)`.
pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    min_eigenvalue(m) >= -tol * (1.0 + spectral_norm(m))
}

/// Applies a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let eig = hermitian_eigen(m);
    let n = m.nrows();
    let mut scaled = eig.vectors.clone();
    for j in 0..n {
        let fj = re(f(eig.values[j]));
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
    }
    hermitian_part(&mul(&scaled, &eig.vectors.adjoint()))
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &CMatrix) -> CMatrix {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    let ident = CMatrix::identity(n, n);
    if n == 0 {
        return ident;
    }
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * re(0.5f64.powi(squarings));
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| re(B[k]);
    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9));
    let u = &scaled * (u_inner + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &ident * c(1));
    let v_inner = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8));
    let v = v_inner + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &ident * c(0);
    let mut r = solve(&(&v - &u), &(&v + &u)).expect("Padé denominator is singular");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}
