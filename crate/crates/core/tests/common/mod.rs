//! Reference computations written independently of the library: closed-form
//! P1 matrices, symmetric square roots and a grid search for ellipticity.
#![allow(dead_code)]

use formlab::{CMatrix, CVector, FormPair};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

/// Full nodal stiffness and mass on a uniform mesh of `(0, 1)` with `n` cells.
pub fn p1(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let h = 1.0 / n as f64;
    let k = DMatrix::from_fn(n + 1, n + 1, |i, j| {
        let boundary = i == 0 || i == n;
        match (i as isize - j as isize).abs() {
            0 if boundary => 1.0 / h,
            0 => 2.0 / h,
            1 => -1.0 / h,
            _ => 0.0,
        }
    });
    let m = DMatrix::from_fn(n + 1, n + 1, |i, j| {
        let boundary = i == 0 || i == n;
        match (i as isize - j as isize).abs() {
            0 if boundary => h / 3.0,
            0 => 2.0 * h / 3.0,
            1 => h / 6.0,
            _ => 0.0,
        }
    });
    (k, m)
}

pub fn interior(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() - 1;
    m.view((1, 1), (n - 1, n - 1)).into_owned()
}

/// `M^{-1/2}` for symmetric positive definite `M`.
pub fn inv_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Ascending eigenvalues of the pencil `(K, M)` through `M^{-1/2} K M^{-1/2}`.
pub fn pencil_eigenvalues(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<f64> {
    let w = inv_sqrt(m);
    let mut v: Vec<f64> = (&w * k * &w).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// `f(M^{-1/2} K M^{-1/2})` transported back: the operator `f(M⁻¹K)`.
pub fn pencil_function(k: &DMatrix<f64>, m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let w = inv_sqrt(m);
    let eig = (&w * k * &w).symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    let msqrt = w.clone().try_inverse().unwrap();
    &w * &eig.eigenvectors * d * eig.eigenvectors.transpose() * msqrt
}

/// Trace norm of an `M`-self-adjoint operator `D`: `Σ |eig(M^{1/2} D M^{-1/2})|`.
pub fn weighted_trace_norm(d: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
    let w = inv_sqrt(m);
    let msqrt = w.clone().try_inverse().unwrap();
    let sym = &msqrt * d * &w;
    let sym = (&sym + sym.transpose()) * 0.5;
    sym.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).sum()
}

/// Smallest eigenvalue of a Hermitian matrix against a positive definite one.
pub fn min_pencil(a: &CMatrix, b: &CMatrix) -> f64 {
    let l = b.clone().cholesky().expect("positive definite").l();
    let li = l.clone().try_inverse().unwrap();
    let m = &li * a * li.adjoint();
    let m = (&m + m.adjoint()) * c(0.5);
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// First `(ω, μ)` on a grid over `[-10, 10] x (0, 1]` for which
/// `Re a(u,u) - ω‖ju‖² - μ‖u‖² ≥ 0`, if any.
pub fn grid_ellipticity(pair: &FormPair) -> Option<(f64, f64)> {
    let s = pair.form().matrix();
    let herm = (s + s.adjoint()) * c(0.5);
    let jg = pair.j().adjoint() * pair.target().gram() * pair.j();
    let g = pair.source().gram();
    let mus: Vec<f64> = (0..=24).map(|k| 0.5f64.powi(k)).collect();
    for step in 0..=80 {
        let omega = -10.0 + 0.25 * step as f64;
        for &mu in &mus {
            let m = &herm - &jg * c(omega) - g * c(mu);
            if min_pencil(&m, &CMatrix::identity(g.nrows(), g.nrows())) >= -1e-12 * (1.0 + m.norm()) {
                return Some((omega, mu));
            }
        }
    }
    None
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `B B* + shift I`.
pub fn random_gram(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> CMatrix {
    let b = random_matrix(rng, n, n);
    &b * b.adjoint() + CMatrix::identity(n, n) * c(shift)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let b = random_matrix(rng, n, n);
    (&b + b.adjoint()) * c(0.5)
}
