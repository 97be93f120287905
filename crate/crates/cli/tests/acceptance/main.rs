//! Acceptance run: one `PASS`/`FAIL` line per criterion on stdout.
//!
//! Reference values come from closed forms or from computations in this file
//! that do not go through the library code under test. Lines are written to
//! the real stdout so they survive the test harness's capture.
//!
//! The command-line contract tests live in [`cli`] and share this binary, so
//! an expected failure here cannot stop them from running.

mod cli;

use std::f64::consts::PI;
use std::fmt::Display;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use formlab::forms::{check_domination, direct_eigenvalues, minimax_eigenvalues};
use formlab::gallery::{
    self, build_dtn, build_interval_model, comparison_triple, counterexample_2x2, partial_sums, BoundaryCondition,
    DiagonalKind, DiagonalModel, IntervalModelSpec,
};
use formlab::linalg::re;
use formlab::semigroup::{
    factorization_identity_residual, interpolation_space, mosco_surrogate, schatten_norm, three_factor_constant,
    trace_convergence_experiment, ultracontractivity_exponent, Family, MoscoOptions,
};
use formlab::{associated_operator, CMatrix, CVector, FormPair, InnerProductSpace};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: &str, pass: bool, detail: impl Display) {
    let line = format!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
    assert!(pass, "{line}");
}

fn sci(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>().join(", ")
}

fn family(parameters: &[f64], build: impl Fn(f64) -> FormPair) -> Family {
    Family::new(parameters.to_vec(), parameters.iter().map(|&x| build(x)).collect()).unwrap()
}

// ---------------------------------------------------------------- oracles

/// Eigen-decomposition square root of a Hermitian positive definite matrix,
/// raised to `power`.
fn hermitian_power(g: &CMatrix, power: f64) -> CMatrix {
    let eig = g.clone().symmetric_eigen();
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| re(x.powf(power))));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Schatten norm of `T: (ℂⁿ, G_src) -> (ℂᵐ, G_dst)` through `G_dst^{1/2} T G_src^{-1/2}`.
fn schatten_oracle(t: &CMatrix, p: f64, src: &CMatrix, dst: &CMatrix) -> f64 {
    let w = hermitian_power(dst, 0.5) * t * hermitian_power(src, -0.5);
    let s = w.svd(false, false).singular_values;
    s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn random_gram(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let b = random_matrix(rng, n, n);
    &b * b.adjoint() + CMatrix::identity(n, n) * re(0.5)
}

/// A unitary of the Gram `G`: `U = G^{-1/2} W G^{1/2}` with `W` Euclidean unitary.
fn gram_unitary(rng: &mut ChaCha8Rng, g: &CMatrix) -> CMatrix {
    let n = g.nrows();
    let w = random_matrix(rng, n, n).qr().q();
    hermitian_power(g, -0.5) * w * hermitian_power(g, 0.5)
}

/// P1 mass on the interior nodes of a uniform mesh with `n` cells.
fn interior_mass(n: usize) -> DMatrix<f64> {
    let h = 1.0 / n as f64;
    DMatrix::from_fn(n - 1, n - 1, |i, j| match (i as isize - j as isize).abs() {
        0 => 2.0 * h / 3.0,
        1 => h / 6.0,
        _ => 0.0,
    })
}

/// Eigenvalues of P1 Dirichlet `-u''` on a uniform mesh with consistent mass.
fn p1_dirichlet_eigenvalue(n: usize, k: usize) -> f64 {
    let h = 1.0 / n as f64;
    let c = (k as f64 * PI * h).cos();
    6.0 / (h * h) * (1.0 - c) / (2.0 + c)
}

fn min_eig_2x2(m: [[f64; 2]; 2]) -> f64 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    0.5 * (tr - (tr * tr - 4.0 * det).sqrt())
}

// ---------------------------------------------------------------- criteria

#[test]
fn criterion_01_counterexample() {
    let start = Instant::now();
    let ce = counterexample_2x2();
    let (a, b) = ce.pairs();
    let report = check_domination(&b, &a, &[1.0]).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    // A² = 4A gives e^{-A} = I + (e^{-4} - 1)/4 A and (1 + A)⁻¹ = I - A/5.
    let c = ((-4.0f64).exp() - 1.0) / 4.0;
    let exp_a = [[1.0 + 2.0 * c, 2.0 * c], [2.0 * c, 1.0 + 2.0 * c]];
    let semigroup_oracle = min_eig_2x2([
        [exp_a[0][0] - (-3.0f64).exp(), exp_a[0][1]],
        [exp_a[1][0], exp_a[1][1] - (-6.0f64).exp()],
    ]);
    let resolvent_oracle = min_eig_2x2([[1.0 - 0.4 - 0.25, -0.4], [-0.4, 1.0 - 0.4 - 1.0 / 7.0]]);

    let eig_ok = (ce.eig_a[0]).abs() < 1e-12 && (ce.eig_a[1] - 4.0).abs() < 1e-12;
    let psd_ok = ce.eig_b_minus_a[0] >= -1e-12 && report.dominates();
    let semigroup_ok =
        report.semigroup_min_eigenvalue < -1e-6 && (report.semigroup_min_eigenvalue - semigroup_oracle).abs() < 1e-12;
    let resolvent = report.resolvents[0].min_eigenvalue;
    let resolvent_ok = resolvent >= -1e-12 && (resolvent - resolvent_oracle).abs() < 1e-12;
    verdict(
        "[01] counterexample",
        eig_ok && psd_ok && semigroup_ok && resolvent_ok && elapsed < 1.0,
        format!(
            "eig(A) = {:?}, eigmin(B-A) = {:.3e}, eigmin(e^-A - e^-B) = {:.6e} (oracle {:.6e}), \
             eigmin((1+A)^-1 - (1+B)^-1) = {:.6e} (oracle {:.6e}), {:.3} s",
            ce.eig_a,
            ce.eig_b_minus_a[0],
            report.semigroup_min_eigenvalue,
            semigroup_oracle,
            resolvent,
            resolvent_oracle,
            elapsed
        ),
    );
}

#[test]
fn criterion_02_minimax_matches_direct_eigensolve() {
    let start = Instant::now();
    let triple = comparison_triple(64, 1.0).unwrap();
    let (ce_a, ce_b) = counterexample_2x2().pairs();
    let y = CMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0].map(re));
    let models: Vec<(&str, FormPair)> = vec![
        ("neumann n=64", gallery::neumann(64).unwrap()),
        ("dirichlet n=256", gallery::dirichlet(256).unwrap()),
        ("robin k=1 n=64", gallery::robin(64, 1.0).unwrap()),
        ("dtn gamma=0 n=16", gallery::dtn(16, 0.0).unwrap()),
        ("dtn gamma=1 alpha=1.5 n=32", build_dtn(32, 1.5, re(1.0), None).unwrap()),
        ("wentzell rho=1 sigma=1 n=32", gallery::wentzell(32, 1.0, 1.0).unwrap()),
        ("dirichlet plus zero n=32", gallery::dirichlet_plus_zero(32).unwrap()),
        ("multiplicative m=2 n=48", gallery::multiplicative(48, 2.0).unwrap()),
        ("comparison A1 n=64", triple[0].clone()),
        ("comparison A2 n=64", triple[1].clone()),
        ("comparison A3 n=64", triple[2].clone()),
        (
            "coupled boundary n=16",
            build_interval_model(&IntervalModelSpec::new(16, BoundaryCondition::Subspace { y })).unwrap(),
        ),
        ("counterexample A", ce_a),
        ("counterexample B", ce_b),
    ];
    let mut worst = (0.0f64, "");
    let mut all_small = true;
    for (name, pair) in &models {
        let dim = pair.target().dim();
        all_small &= dim <= 256;
        let minimax = minimax_eigenvalues(pair, dim).unwrap();
        let direct = direct_eigenvalues(&associated_operator(pair).unwrap());
        for (x, y) in minimax.iter().zip(&direct) {
            let err = (x - y).abs() / y.abs().max(1.0);
            if err > worst.0 {
                worst = (err, name);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "[02] minimax vs direct eigensolve",
        models.len() >= 12 && all_small && worst.0 <= 1e-9 && elapsed < 30.0,
        format!(
            "{} models, worst relative error {:.3e} ({}), {:.2} s",
            models.len(),
            worst.0,
            worst.1,
            elapsed
        ),
    );
}

#[test]
fn criterion_03_dirichlet_spectrum() {
    let n = 512;
    let values = minimax_eigenvalues(&gallery::dirichlet(n).unwrap(), 5).unwrap();
    let continuum: Vec<f64> = (1..=5)
        .map(|k| ((k as f64 * PI).powi(2) - values[k - 1]).abs() / (k as f64 * PI).powi(2))
        .collect();
    let discrete = (1..=5)
        .map(|k| (values[k - 1] - p1_dirichlet_eigenvalue(n, k)).abs() / p1_dirichlet_eigenvalue(n, k))
        .fold(0.0f64, f64::max);
    let worst = continuum.iter().copied().fold(0.0f64, f64::max);
    verdict(
        "[03] Dirichlet spectrum n=512",
        worst <= 1e-2 && discrete <= 1e-9,
        format!("max |λ_k - (kπ)²|/(kπ)² = {worst:.3e}, distance to P1 closed form {discrete:.3e}"),
    );
}

#[test]
fn criterion_04_comparison_ordering() {
    let triple = comparison_triple(128, 1.0).unwrap();
    // A3 lives on ℂ²; its missing eigenvalues count as +∞.
    let spectra: Vec<Vec<f64>> = triple
        .iter()
        .map(|p| {
            let mut values = minimax_eigenvalues(p, p.target().dim().min(10)).unwrap();
            values.resize(10, f64::INFINITY);
            values
        })
        .collect();
    let margin = (0..10)
        .map(|k| (spectra[0][k] - spectra[1][k]).min(spectra[2][k] - spectra[1][k]))
        .fold(f64::INFINITY, f64::min);
    verdict(
        "[04] eigenvalue ordering A2 <= A1, A3",
        margin >= -1e-9,
        format!("min over k <= 10 of min(λ_k(A1), λ_k(A3)) - λ_k(A2) = {margin:.6e}"),
    );
}

#[test]
fn criterion_05_robin_to_neumann() {
    let ks: Vec<f64> = (1..=8).map(|i| 0.5f64.powi(i)).collect();
    let fam = family(&ks, |k| gallery::robin(128, k).unwrap());
    let neumann = gallery::neumann(128).unwrap();
    let result = trace_convergence_experiment(&fam, &neumann, &neumann, &[0.1]).unwrap();
    let report = &result.trace_norms[0];
    let ratios = report.ratios();
    let ok = report.strictly_decreasing() && ratios.iter().all(|r| (r - 0.5).abs() <= 0.2);
    verdict(
        "[05] Robin to Neumann trace norms",
        ok,
        format!(
            "values {:.4e} .. {:.4e}, ratios {:.4?}",
            report.values[0], report.values[7], ratios
        ),
    );
}

#[test]
fn criterion_06_dtn_exactness() {
    let pair = gallery::dtn(16, 0.0).unwrap();
    let op = associated_operator(&pair).unwrap();
    let exact = CMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0].map(re));
    let entry_error = (op.matrix() - exact).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let values = minimax_eigenvalues(&pair, 2).unwrap();
    let eig_error = values[0].abs().max((values[1] - 2.0).abs());
    verdict(
        "[06] DtN exactness n=16",
        entry_error <= 1e-10 && eig_error <= 1e-10,
        format!("max entry error {entry_error:.3e}, eigenvalues {values:?}"),
    );
}

#[test]
fn criterion_07_dtn_trace_convergence() {
    let sizes: Vec<f64> = (1..=8).map(|i| 2f64.powi(i)).collect();
    let fam = family(&sizes, |n| {
        build_dtn(n as usize, 1.0 + 1.0 / n, re(1.0 / n), None).unwrap()
    });
    let target = gallery::dtn(2, 0.0).unwrap();
    let result = trace_convergence_experiment(&fam, &target, &target, &[1.0]).unwrap();
    let report = &result.trace_norms[0];
    let rate = report.fitted_rate.unwrap_or(f64::NAN);
    verdict(
        "[07] DtN trace convergence",
        report.strictly_decreasing() && (rate + 1.0).abs() <= 0.3,
        format!(
            "values {:.4e} .. {:.4e}, fitted rate {rate:.4}",
            report.values[0], report.values[7]
        ),
    );
}

#[test]
fn criterion_08a_gibbs_log_squared() {
    let cps = [1000, 10_000, 100_000];
    let model = DiagonalModel::new(DiagonalKind::LogSquared, 100_000);
    let semigroup = partial_sums(&model.semigroup_singular_values(1.0), 1.0, &cps);
    let resolvent = partial_sums(&model.resolvent_singular_values(), 1.0, &cps);
    // Direct sums of e^{-log² n} and (1 + log² n)⁻¹.
    let direct = |f: &dyn Fn(f64) -> f64, upto: usize| (1..=upto).map(|n| f((n as f64).ln().powi(2))).sum::<f64>();
    let agree = cps.iter().enumerate().all(|(i, &cp)| {
        (semigroup[i] - direct(&|l| (-l).exp(), cp)).abs() <= 1e-12 * semigroup[i]
            && (resolvent[i] - direct(&|l| 1.0 / (1.0 + l), cp)).abs() <= 1e-12 * resolvent[i]
    });
    let increment = semigroup[1] - semigroup[0];
    let growth = resolvent[2] / resolvent[1] - 1.0;
    verdict(
        "[08a] log-squared Gibbs model",
        agree && increment < 1e-6 && growth > 1.0,
        format!(
            "trace increment 1e3 -> 1e4 = {increment:.3e}, resolvent L1 growth 1e4 -> 1e5 = {:.1}%",
            100.0 * growth
        ),
    );
}

fn sine_sums(p: f64) -> (Vec<f64>, bool) {
    let cps = [100, 1000, 10_000, 100_000];
    let model = DiagonalModel::new(DiagonalKind::Sine { alpha: 1.0 }, 100_000);
    let sums = partial_sums(&model.sine_singular_values(1.0), p, &cps);
    // ωₙ = π/2 + 2πn, so |sin ωₙ| = 1 and sₙ = 1/ωₙ.
    let agree = cps.iter().zip(&sums).all(|(&cp, s)| {
        let direct: f64 = (1..=cp).map(|n| (PI / 2.0 + 2.0 * PI * n as f64).powf(-p)).sum();
        (s - direct).abs() <= 1e-12 * direct
    });
    (sums, agree)
}

#[test]
fn criterion_08b_sine_hilbert_schmidt() {
    let (sums, agree) = sine_sums(2.0);
    let increment = sums[2] - sums[1];
    verdict(
        "[08b] sine model L2 sums converge",
        agree && increment < 1e-3,
        format!("L2² increment 1e3 -> 1e4 = {increment:.3e}"),
    );
}

/// Expected to fail: with `sₙ = 1/(π/2 + 2πn)` the partial L1 sums grow by
/// `ln 10 / (2π)` per decade in absolute terms, roughly 24 to 32 percent
/// relative over 1e2..1e5, never 50 percent.
#[test]
fn criterion_08c_sine_trace_norm_growth() {
    let (sums, agree) = sine_sums(1.0);
    let growth: Vec<f64> = sums.windows(2).map(|w| 100.0 * (w[1] / w[0] - 1.0)).collect();
    verdict(
        "[08c] sine model L1 sums grow > 50% per decade",
        agree && growth.iter().all(|&g| g > 50.0),
        format!("growth per decade {growth:.1?} %"),
    );
}

#[test]
fn criterion_09a_wentzell_sigma_infinity() {
    let n = 64;
    let sigmas = [1.0, 10.0, 100.0, 1000.0];
    let fam = family(&sigmas, |s| gallery::wentzell(n, 1.0, s).unwrap());
    let target = gallery::dirichlet_plus_zero(n).unwrap();
    let mut probe = CVector::from_fn(n + 1, |i, _| {
        if i < n - 1 {
            re(((i + 1) as f64 * PI / n as f64).sin())
        } else {
            re(0.0)
        }
    });
    probe[n - 1] = re(1.0);
    probe[n] = re(-0.5);
    let report = mosco_surrogate(&fam, Some(&target), &[probe], MoscoOptions::default()).unwrap();
    let errors = report.probes[0].resolvent_error.clone().unwrap();
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    verdict(
        "[09a] Wentzell sigma -> infinity",
        decreasing && errors[3] <= 0.1 * errors[0],
        format!("resolvent errors [{}]", sci(&errors)),
    );
}

/// Probes for the two non-convergent limits and the oracle `δ` for each.
///
/// As the parameter vanishes, bounded energy forces the scaled component of
/// `j(u)` to zero, so the best recovery is `y = 0` and the gap tends to
/// `‖x‖_H`. The threshold is half of that limit.
struct NonConvergent {
    name: &'static str,
    parameters: Vec<f64>,
    family: Family,
    probe: CVector,
    delta: f64,
}

fn wentzell_probes(n: usize) -> [NonConvergent; 2] {
    let decades = [1e-1, 1e-2, 1e-3, 1e-4];
    let boundary = CVector::from_fn(n + 1, |i, _| re(if i >= n - 1 { 1.0 } else { 0.0 }));
    let profile: Vec<f64> = (1..n).map(|i| (i as f64 * PI / n as f64).sin()).collect();
    let interior = CVector::from_fn(n + 1, |i, _| re(profile.get(i).copied().unwrap_or(0.0)));
    let v = nalgebra::DVector::from_vec(profile);
    let interior_norm = (v.transpose() * interior_mass(n) * &v)[(0, 0)].sqrt();
    [
        NonConvergent {
            name: "sigma -> 0, boundary probe",
            parameters: decades.to_vec(),
            family: family(&decades, |s| gallery::wentzell(n, 1.0, s).unwrap()),
            probe: boundary,
            delta: 0.5 * 2f64.sqrt(),
        },
        NonConvergent {
            name: "rho -> 0, interior probe",
            parameters: decades.to_vec(),
            family: family(&decades, |r| gallery::wentzell(n, r, 1.0).unwrap()),
            probe: interior,
            delta: 0.5 * interior_norm,
        },
    ]
}

#[test]
fn criterion_09b_wentzell_recovery_gap() {
    for case in wentzell_probes(64) {
        let report = mosco_surrogate(&case.family, None, &[case.probe], MoscoOptions::default()).unwrap();
        let gaps = &report.probes[0].recovery_gap;
        verdict(
            &format!("[09b] Wentzell {}: recovery gap >= δ", case.name),
            gaps.iter().all(|&g| g >= case.delta) && report.non_convergence(),
            format!(
                "δ = {:.6}, gaps {gaps:.6?} over parameters {:?}",
                case.delta, case.parameters
            ),
        );
    }
}

/// Expected to fail: the resolvents do converge at the probe (to a
/// pseudo-resolvent that belongs to no closed operator), so consecutive
/// resolvent differences shrink by about 10 per decade.
#[test]
fn criterion_09c_wentzell_resolvent_cauchy_gap() {
    let mut lines = Vec::new();
    let mut pass = true;
    for case in wentzell_probes(64) {
        let report = mosco_surrogate(&case.family, None, &[case.probe], MoscoOptions::default()).unwrap();
        let cauchy = &report.probes[0].cauchy;
        pass &= cauchy.iter().all(|&c| c >= case.delta);
        lines.push(format!("{}: δ = {:.6}, gaps [{}]", case.name, case.delta, sci(cauchy)));
    }
    verdict("[09c] Wentzell resolvent Cauchy gap >= δ", pass, lines.join("; "));
}

#[test]
fn criterion_10_schatten_suite() {
    let mut worst = 0.0f64;
    let mut holds = true;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m, k) = (rng.random_range(2..7), rng.random_range(2..7), rng.random_range(2..7));
        let grams: Vec<CMatrix> = [n, m, k].iter().map(|&d| random_gram(&mut rng, d)).collect();
        let spaces: Vec<InnerProductSpace> = grams
            .iter()
            .map(|g| InnerProductSpace::new(g.clone()).unwrap())
            .collect();
        let t = random_matrix(&mut rng, m, n);
        let s = random_matrix(&mut rng, k, m);
        let p = rng.random_range(1.0..6.0);
        let q = rng.random_range(1.0..6.0);
        let r = 1.0 / (1.0 / p + 1.0 / q);
        let norm = |x: &CMatrix, e: f64, a: usize, b: usize| schatten_norm(x, e, &spaces[a], &spaces[b]).unwrap().value;

        for (x, e, a, b) in [(&t, p, 0, 1), (&s, q, 1, 2)] {
            let oracle = schatten_oracle(x, e, &grams[a], &grams[b]);
            worst = worst.max((norm(x, e, a, b) - oracle).abs() / oracle);
        }

        // Hölder; exponents below one are evaluated on the oracle's singular values.
        let st = &s * &t;
        let lhs = schatten_oracle(&st, r, &grams[0], &grams[2]);
        holds &= lhs <= norm(&s, q, 1, 2) * norm(&t, p, 0, 1) * (1.0 + 1e-10);

        // Monotonicity in the exponent.
        let (lo, hi) = (p.min(q), p.max(q));
        holds &= norm(&t, hi, 0, 1) <= norm(&t, lo, 0, 1) * (1.0 + 1e-10);

        // Invariance under unitaries of the source and target Grams.
        let u_src = gram_unitary(&mut rng, &grams[0]);
        let u_dst = gram_unitary(&mut rng, &grams[1]);
        let base = norm(&t, p, 0, 1);
        worst = worst.max((norm(&(&u_dst * &t * &u_src), p, 0, 1) - base).abs() / base);
    }
    verdict(
        "[10] Schatten suite, 100 seeded pairs",
        holds && worst <= 1e-10,
        format!("inequalities hold: {holds}, worst relative deviation {worst:.3e}"),
    );
}

/// `‖D‖_{L_q(H, H_θ)}` for `H_θ` with Gram `G^{1/2} (G^{-1/2} G̃ G^{-1/2})^{1-θ} G^{1/2}`.
fn three_factor_oracle(d: &CMatrix, base: &CMatrix, fine: &CMatrix, theta: f64, p: f64) -> f64 {
    let q = 1.0 / (theta / p + (1.0 - theta));
    let half = hermitian_power(base, 0.5);
    let inv_half = hermitian_power(base, -0.5);
    let lambda_sq = &inv_half * fine * &inv_half;
    let lambda_sq = (&lambda_sq + lambda_sq.adjoint()) * re(0.5);
    let g_theta = &half * hermitian_power(&lambda_sq, 1.0 - theta) * &half;
    let g_theta = (&g_theta + g_theta.adjoint()) * re(0.5);
    schatten_oracle(d, q, base, &g_theta)
        / (schatten_oracle(d, 1.0, base, fine).powf(theta) * schatten_oracle(d, p, base, base).powf(1.0 - theta))
}

#[test]
fn criterion_11_interpolation_suite() {
    let n = 16;
    let neumann = gallery::neumann(n).unwrap();
    let base = neumann.target().clone();
    let fine = neumann.source().clone();
    let (theta, p) = (0.5, 2.0);

    let zero = interpolation_space(&base, &fine, 0.0).unwrap();
    let one = interpolation_space(&base, &fine, 1.0).unwrap();
    let endpoint = ((&zero.gram_theta - fine.gram()).norm() / fine.gram().norm())
        .max((&one.gram_theta - base.gram()).norm() / base.gram().norm());

    let mut oracle_gap = 0.0f64;
    let mut fit = |seeds: std::ops::Range<u64>| -> f64 {
        seeds
            .map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let d = random_matrix(&mut rng, n + 1, n + 1);
                let c = three_factor_constant(&d, &base, &fine, theta, p).unwrap();
                let oracle = three_factor_oracle(&d, base.gram(), fine.gram(), theta, p);
                oracle_gap = oracle_gap.max((c - oracle).abs() / oracle);
                c
            })
            .fold(0.0f64, f64::max)
    };
    let c1 = fit(0..50);
    let c2 = fit(1000..1050);
    let ratio = c1.max(c2) / c1.min(c2);
    verdict(
        "[11] interpolation suite",
        endpoint <= 1e-12 && c1.is_finite() && c2.is_finite() && ratio <= 3.0 && oracle_gap <= 1e-8,
        format!(
            "endpoint error {endpoint:.3e}, fitted C = {c1:.6} and {c2:.6} (ratio {ratio:.4}), \
             oracle agreement {oracle_gap:.3e}"
        ),
    );
}

#[test]
fn criterion_12_ultracontractivity() {
    let n = 1024;
    let grid: Vec<f64> = (0..41).map(|i| 10f64.powf(-3.0 + 2.0 * i as f64 / 40.0)).collect();
    let cases = [
        ("Neumann", gallery::neumann(n).unwrap(), gallery::lumped_mass(n)),
        ("Dirichlet", gallery::dirichlet(n).unwrap(), vec![1.0 / n as f64; n - 1]),
    ];
    for (name, pair, mass) in cases {
        let fit = ultracontractivity_exponent(&associated_operator(&pair).unwrap(), &mass, &grid).unwrap();
        verdict(
            &format!("[12] ultracontractivity {name}"),
            (0.20..=0.30).contains(&fit.beta),
            format!(
                "β = {:.4}, c = {:.4}, log residual {:.3e}",
                fit.beta, fit.constant, fit.residual
            ),
        );
    }
}

#[test]
fn criterion_13_resolvent_factorization() {
    let n = 32;
    let a0 = associated_operator(&gallery::neumann(n).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for k in [0.5, 1.0, 2.0, 8.0] {
        let an = associated_operator(&gallery::robin(n, k).unwrap()).unwrap();
        worst = worst.max(factorization_identity_residual(&a0, &an, re(1.0), Complex64::new(2.0, 1.0)).unwrap());
    }
    verdict(
        "[13] resolvent factorization identity",
        worst <= 1e-11,
        format!("max relative residual {worst:.3e} over Robin k in {{0.5, 1, 2, 8}} against Neumann"),
    );
}

#[test]
fn criterion_14_reproducibility() {
    let dir = tempfile::TempDir::new().unwrap();
    let names: Vec<&str> = formlab_cli::registry().iter().map(|e| e.name).collect();
    let differing: Vec<&str> = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|&name| {
                let dir = dir.path();
                scope.spawn(move || {
                    let config = dir.join(format!("{name}.json"));
                    std::fs::write(&config, format!("{{\"experiment\": \"{name}\"}}")).unwrap();
                    let runs: Vec<Vec<u8>> = ["a", "b"]
                        .iter()
                        .map(|run| {
                            let out = dir.join(run);
                            let status = Command::new(env!("CARGO_BIN_EXE_formlab"))
                                .env("FORMLAB_THREADS", "1")
                                .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
                                .output()
                                .unwrap()
                                .status;
                            assert!(matches!(status.code(), Some(0 | 2)), "{name} exited with {status}");
                            std::fs::read(out.join(format!("{name}.csv"))).unwrap()
                        })
                        .collect();
                    (name, runs[0] == runs[1])
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap())
            .filter(|(_, same)| !same)
            .map(|(n, _)| n)
            .collect()
    });
    verdict(
        "[14] reproducibility",
        differing.is_empty(),
        format!("{} experiments run twice, differing: {differing:?}", names.len()),
    );
}
