mod common;

use common::*;
use formlab::forms::minimax_eigenvalues;
use formlab::gallery::{
    self, build_dtn, build_interval_model, partial_sums, rotated_subspace, BoundaryCondition, Coefficients,
    DiagonalKind, DiagonalModel, IntervalModelSpec,
};
use formlab::semigroup::{operator_norm, resolvent};
use formlab::{associated_operator, check_j_ellipticity, CMatrix, FormError};
use num_complex::Complex64;

#[test]
fn wentzell_pair_is_elliptic() {
    let pair = gallery::wentzell(16, 1.0, 1.0).unwrap();
    let cert = check_j_ellipticity(&pair).into_result().unwrap();
    assert!(cert.mu > 0.0 && cert.holds_for(&pair));
    assert!(grid_ellipticity(&pair).is_some());
}

#[test]
fn dtn_with_unit_potential_matches_two_point_solution() {
    // -u'' + u = 0 on (0, 1): the conormal derivatives of the extension of
    // (φ₀, φ₁) are given by [[coth 1, -csch 1], [-csch 1, coth 1]].
    let op = associated_operator(&build_dtn(256, 1.0, c(1.0), None).unwrap()).unwrap();
    let coth = 1.0f64.cosh() / 1.0f64.sinh();
    let csch = 1.0 / 1.0f64.sinh();
    let expect = CMatrix::from_row_slice(2, 2, &[c(coth), c(-csch), c(-csch), c(coth)]);
    assert!((op.matrix() - &expect).norm() < 1e-4, "{}", op.matrix());
    assert!(op.self_adjointness_defect() < 1e-12);
    let values = minimax_eigenvalues(op.origin(), 2).unwrap();
    assert!(values[0] > 0.0);
    assert!((values[0] - (coth - csch)).abs() < 1e-4 && (values[1] - (coth + csch)).abs() < 1e-4);
}

#[test]
fn dtn_without_potential_has_constant_kernel() {
    let op = associated_operator(&gallery::dtn(40, 0.0).unwrap()).unwrap();
    let values = minimax_eigenvalues(op.origin(), 2).unwrap();
    assert!(values[0].abs() < 1e-12);
    let constants = formlab::CVector::from_element(2, c(1.0));
    assert!((op.matrix() * constants).norm() < 1e-12);
}

#[test]
fn dtn_rejects_potential_below_ground_state() {
    let lambda = gallery::dirichlet_ground_state(20, &[1.0; 20]);
    assert!((lambda - std::f64::consts::PI.powi(2)).abs() < 0.1);
    assert!(matches!(
        build_dtn(20, 1.0, c(-lambda - 0.5), None),
        Err(FormError::InvalidParameter(_))
    ));
    assert!(build_dtn(20, 1.0, c(-lambda + 0.5), None).is_ok());
}

#[test]
fn variable_coefficients_are_sampled_per_cell() {
    let n = 10;
    let coef = Coefficients::sampled(n, |x| 1.0 + x, |_| Complex64::new(0.0, 0.0), |_| 1.0);
    assert!((coef.alpha[0] - 1.05).abs() < 1e-15 && (coef.alpha[9] - 1.95).abs() < 1e-15);
    let pair =
        build_interval_model(&IntervalModelSpec::new(n, BoundaryCondition::Neumann).with_coefficients(coef)).unwrap();
    // Constants lie in the kernel of the stiffness part.
    let ones = formlab::CVector::from_element(n + 1, c(1.0));
    assert!((pair.form().matrix() * ones).norm() < 1e-12);
}

#[test]
fn robin_eigenvalues_increase_with_k() {
    let n = 64;
    let spectra: Vec<Vec<f64>> = [0.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&k| minimax_eigenvalues(&gallery::robin(n, k).unwrap(), 10).unwrap())
        .collect();
    for pair in spectra.windows(2) {
        for (lo, hi) in pair[0].iter().zip(&pair[1]) {
            assert!(lo <= hi, "{lo} > {hi}");
        }
    }
    // Oracle for k = 1 from the pencil directly.
    let (k, m) = p1(n);
    let mut e = nalgebra::DMatrix::zeros(n + 1, n + 1);
    e[(0, 0)] = 1.0;
    e[(n, n)] = 1.0;
    let oracle = pencil_eigenvalues(&(&k + &e), &m);
    for i in 0..10 {
        assert!((spectra[2][i] - oracle[i]).abs() <= 1e-9 * oracle[i].max(1.0));
    }
}

#[test]
fn rotated_boundary_subspaces_converge_in_resolvent() {
    let n = 32;
    let y = CMatrix::from_column_slice(4, 2, &[c(1.0), c(0.0), c(0.0), c(1.0), c(0.0), c(1.0), c(1.0), c(0.0)]);
    let mut rng = rng(0x5B);
    let generator = random_hermitian(&mut rng, 4);
    let build = |y: CMatrix| {
        let pair = build_interval_model(&IntervalModelSpec::new(n, BoundaryCondition::Subspace { y })).unwrap();
        let op = associated_operator(&pair).unwrap();
        (resolvent(&op, c(1.0)).unwrap().matrix, op.space().clone())
    };
    let (target, h) = build(y.clone());
    let errors: Vec<f64> = (1..=8)
        .map(|i| {
            let yn = rotated_subspace(&y, &generator, 0.5f64.powi(i)).unwrap();
            operator_norm(&(build(yn).0 - &target), &h, &h)
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[7] < 1e-2 * errors[0]);
    let theta_zero = rotated_subspace(&y, &generator, 0.0).unwrap();
    assert!(operator_norm(&(build(theta_zero).0 - &target), &h, &h) < 1e-10);
}

#[test]
fn log_plain_sums_converge_only_for_large_t() {
    let model = DiagonalModel::new(DiagonalKind::LogPlain, 10_000);
    let fast = partial_sums(&model.semigroup_singular_values(2.0), 1.0, &[1_000, 10_000]);
    assert!(fast[1] - fast[0] < 1e-3);
    // Σ n^{-2} → π²/6.
    assert!((fast[1] - std::f64::consts::PI.powi(2) / 6.0).abs() < 2e-4);
    let slow = partial_sums(&model.semigroup_singular_values(0.5), 1.0, &[100, 1_000, 10_000]);
    // Σ n^{-1/2} ≈ 2√N.
    assert!(slow[2] / slow[1] > 3.0 && slow[1] / slow[0] > 3.0);
}

#[test]
fn sine_model_frequencies() {
    let model = DiagonalModel::new(DiagonalKind::Sine { alpha: 1.5 }, 4);
    let w = model.frequencies();
    let expect = [1.0, 2.0, 5.0, 8.0].map(|f| std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * f);
    for (a, b) in w.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(model
        .eigenvalues()
        .iter()
        .zip(&w)
        .all(|(l, f)| (l + f * f).abs() < 1e-9));
    let op = model.operator().unwrap();
    assert!((op.matrix()[(0, 0)].re - w[0] * w[0]).abs() < 1e-12);
}

#[test]
fn counterexample_values() {
    let ce = gallery::counterexample_2x2();
    assert!(ce.eig_a[0].abs() < 1e-14 && (ce.eig_a[1] - 4.0).abs() < 1e-14);
    assert!(ce.eig_b_minus_a[0].abs() < 1e-14 && (ce.eig_b_minus_a[1] - 5.0).abs() < 1e-14);
    // e^{-A} = I - (1 - e^{-4})/4 · A for A = [[2,2],[2,2]] (A² = 4A).
    let q = (1.0 - (-4.0f64).exp()) / 4.0;
    let e_a = [[1.0 - 2.0 * q, -2.0 * q], [-2.0 * q, 1.0 - 2.0 * q]];
    let (b0, b1) = ((-3.0f64).exp(), (-6.0f64).exp());
    let (p, r, s) = (e_a[0][0] - b0, e_a[0][1], e_a[1][1] - b1);
    let min_eig = 0.5 * (p + s) - (0.25 * (p - s).powi(2) + r * r).sqrt();
    assert!((ce.semigroup_gap - min_eig).abs() < 1e-14);
    assert!(ce.semigroup_gap < -1e-6);
    assert!(ce.resolvent_gap >= -1e-12);
}
