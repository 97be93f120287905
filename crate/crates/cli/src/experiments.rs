//! The experiment catalog.

use std::f64::consts::PI;

use formlab::forms::{check_domination, eigenvalue_domination, minimax_eigenvalues, parabola_parameters, Inclusion};
use formlab::gallery::{
    self, build_dtn, build_interval_model, comparison_triple, counterexample_2x2, partial_sums, rotated_subspace,
    BoundaryCondition, DiagonalKind, DiagonalModel, IntervalModelSpec,
};
use formlab::linalg::re;
use formlab::semigroup::{
    factorization_identity_residual, interpolated_convergence, mosco_surrogate, operator_norm, resolvent,
    trace_convergence_experiment, ultracontractivity_exponent, Family, MoscoOptions, MoscoReport,
};
use formlab::{associated_operator, ehrling_constant, CMatrix, CVector, FormError, FormPair, InnerProductSpace};
use num_complex::Complex64;

use crate::registry::{Context, Experiment, Flag, Outcome, Param, TimeGrid};

type Result<T> = std::result::Result<T, FormError>;

const HALVINGS_8: &[f64] = &[0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625];
const HALVINGS_6: &[f64] = &[0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625];
const POWERS_OF_TWO: &[f64] = &[2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];
const DECADES: &[f64] = &[1e3, 1e4, 1e5];

pub static ALL: &[Experiment] = &[
    Experiment {
        name: "counterexample_2x2",
        anchor: "domination of forms does not imply domination of semigroups",
        params: &[Param {
            name: "gamma",
            default: &[1.0],
        }],
        mesh: None,
        t_grid: TimeGrid::Fixed(&[1.0]),
        run: counterexample,
    },
    Experiment {
        name: "robin_to_neumann",
        anchor: "Robin to Neumann trace-class convergence theorem",
        params: &[Param {
            name: "k",
            default: HALVINGS_8,
        }],
        mesh: Some(128),
        t_grid: TimeGrid::Fixed(&[0.1]),
        run: robin_to_neumann,
    },
    Experiment {
        name: "robin_to_neumann_interpolated",
        anchor: "interpolated Schatten convergence theorem (Robin to Neumann)",
        params: &[
            Param {
                name: "k",
                default: HALVINGS_6,
            },
            Param {
                name: "theta",
                default: &[0.5],
            },
            Param {
                name: "p",
                default: &[1.0],
            },
        ],
        mesh: Some(64),
        t_grid: TimeGrid::Fixed(&[0.1]),
        run: robin_to_neumann_interpolated,
    },
    Experiment {
        name: "dtn_trace_convergence",
        anchor: "Dirichlet-to-Neumann trace-class convergence theorem",
        params: &[Param {
            name: "n",
            default: POWERS_OF_TWO,
        }],
        mesh: None,
        t_grid: TimeGrid::Fixed(&[1.0]),
        run: dtn_trace_convergence,
    },
    Experiment {
        name: "dtn_exactness",
        anchor: "Dirichlet-to-Neumann operator as the operator of a j-elliptic form",
        params: &[Param {
            name: "n",
            default: &[2.0, 16.0, 128.0],
        }],
        mesh: None,
        t_grid: TimeGrid::Unused,
        run: dtn_exactness,
    },
    Experiment {
        name: "dirichlet_spectrum",
        anchor: "Dirichlet Laplacian eigenvalues from the minimax principle",
        params: &[Param {
            name: "k_max",
            default: &[5.0],
        }],
        mesh: Some(512),
        t_grid: TimeGrid::Unused,
        run: dirichlet_spectrum,
    },
    Experiment {
        name: "comparison_triple",
        anchor: "eigenvalue comparison for one form with three embeddings",
        params: &[
            Param {
                name: "beta",
                default: &[1.0],
            },
            Param {
                name: "k_max",
                default: &[10.0],
            },
        ],
        mesh: Some(128),
        t_grid: TimeGrid::Unused,
        run: comparison_triple_run,
    },
    Experiment {
        name: "multiplicative_monotonicity",
        anchor: "eigenvalue monotonicity of multiplicative perturbations",
        params: &[
            Param {
                name: "m",
                default: &[1.0, 1.5, 2.0],
            },
            Param {
                name: "k_max",
                default: &[10.0],
            },
        ],
        mesh: Some(48),
        t_grid: TimeGrid::Unused,
        run: multiplicative_monotonicity,
    },
    Experiment {
        name: "multiplicative_convergence",
        anchor: "trace-class convergence of multiplicative perturbations",
        params: &[
            Param {
                name: "m",
                default: &[1.5, 1.25, 1.125, 1.0625, 1.03125, 1.015625],
            },
            Param {
                name: "m_limit",
                default: &[1.0],
            },
        ],
        mesh: Some(64),
        t_grid: TimeGrid::Fixed(&[0.1]),
        run: multiplicative_convergence,
    },
    Experiment {
        name: "wentzell_sigma_infinity",
        anchor: "Wentzell boundary conditions: Dirichlet limit as sigma grows",
        params: &[
            Param {
                name: "sigma",
                default: &[1.0, 10.0, 100.0, 1000.0],
            },
            Param {
                name: "rho",
                default: &[1.0],
            },
        ],
        mesh: Some(64),
        t_grid: TimeGrid::Unused,
        run: wentzell_sigma_infinity,
    },
    Experiment {
        name: "wentzell_sigma_zero",
        anchor: "Wentzell boundary conditions: no limit as sigma vanishes",
        params: &[
            Param {
                name: "sigma",
                default: &[0.1, 0.01, 0.001],
            },
            Param {
                name: "rho",
                default: &[1.0],
            },
        ],
        mesh: Some(64),
        t_grid: TimeGrid::Unused,
        run: wentzell_sigma_zero,
    },
    Experiment {
        name: "wentzell_rho_zero",
        anchor: "Wentzell boundary conditions: no limit as rho vanishes",
        params: &[
            Param {
                name: "rho",
                default: &[0.1, 0.01, 0.001],
            },
            Param {
                name: "sigma",
                default: &[1.0],
            },
        ],
        mesh: Some(64),
        t_grid: TimeGrid::Unused,
        run: wentzell_rho_zero,
    },
    Experiment {
        name: "gibbs_log_squared",
        anchor: "immediately Gibbs semigroup with non-trace-class resolvent",
        params: &[Param {
            name: "checkpoints",
            default: DECADES,
        }],
        mesh: None,
        t_grid: TimeGrid::Fixed(&[1.0]),
        run: gibbs_log_squared,
    },
    Experiment {
        name: "gibbs_log_plain",
        anchor: "eventually but not immediately Gibbs semigroup",
        params: &[Param {
            name: "checkpoints",
            default: DECADES,
        }],
        mesh: None,
        t_grid: TimeGrid::Fixed(&[0.5, 1.0, 2.0]),
        run: gibbs_log_plain,
    },
    Experiment {
        name: "sine_schatten",
        anchor: "sine function that is Hilbert-Schmidt but not trace class",
        params: &[
            Param {
                name: "alpha",
                default: &[1.0],
            },
            Param {
                name: "checkpoints",
                default: &[1e2, 1e3, 1e4, 1e5],
            },
        ],
        mesh: None,
        t_grid: TimeGrid::Fixed(&[1.0]),
        run: sine_schatten,
    },
    Experiment {
        name: "ultracontractivity",
        anchor: "ultracontractive bound for the heat semigroup on an interval",
        params: &[],
        mesh: Some(1024),
        t_grid: TimeGrid::LogSpaced {
            lo: 1e-3,
            hi: 1e-1,
            points: 41,
        },
        run: ultracontractivity,
    },
    Experiment {
        name: "resolvent_factorization",
        anchor: "resolvent factorization identity behind the Schatten estimates",
        params: &[
            Param {
                name: "k",
                default: &[0.5, 1.0, 2.0],
            },
            Param {
                name: "k0",
                default: &[0.0],
            },
            Param {
                name: "lambda",
                default: &[1.0],
            },
            Param {
                name: "mu_re",
                default: &[2.0],
            },
            Param {
                name: "mu_im",
                default: &[1.0],
            },
        ],
        mesh: Some(32),
        t_grid: TimeGrid::Unused,
        run: resolvent_factorization,
    },
    Experiment {
        name: "coupled_boundary",
        anchor: "convergence of systems with coupled boundary subspaces",
        params: &[Param {
            name: "theta",
            default: HALVINGS_8,
        }],
        mesh: Some(32),
        t_grid: TimeGrid::Unused,
        run: coupled_boundary,
    },
    Experiment {
        name: "dtn_parabola",
        anchor: "parabola containing the numerical range of a non-symmetric form",
        params: &[
            Param {
                name: "gamma_re",
                default: &[0.5],
            },
            Param {
                name: "gamma_im",
                default: &[0.0, 1.0, 2.0, 4.0],
            },
        ],
        mesh: Some(16),
        t_grid: TimeGrid::Unused,
        run: dtn_parabola,
    },
    Experiment {
        name: "ehrling_trace",
        anchor: "Ehrling inequality for the trace on H1",
        params: &[Param {
            name: "epsilon",
            default: &[1.0, 0.5, 0.25, 0.125, 0.0625],
        }],
        mesh: Some(64),
        t_grid: TimeGrid::Unused,
        run: ehrling_trace,
    },
    Experiment {
        name: "robin_domination",
        anchor: "Robin forms dominate the Neumann form and order the resolvents",
        params: &[
            Param {
                name: "k",
                default: &[0.5, 1.0, 2.0],
            },
            Param {
                name: "gamma",
                default: &[0.5, 1.0, 4.0],
            },
        ],
        mesh: Some(32),
        t_grid: TimeGrid::Unused,
        run: robin_domination,
    },
];

fn family(parameters: &[f64], build: impl Fn(f64) -> Result<FormPair>) -> Result<Family> {
    let members = parameters.iter().map(|&x| build(x)).collect::<Result<Vec<_>>>()?;
    Family::new(parameters.to_vec(), members)
}

fn counterexample(ctx: &Context) -> Result<Outcome> {
    let ce = counterexample_2x2();
    let (a, b) = ce.pairs();
    let report = check_domination(&b, &a, ctx.list("gamma"))?;
    let mut out = Outcome::default();
    for (i, v) in ce.eig_a.iter().enumerate() {
        out.push(Some((i + 1) as f64), None, "eig_a", *v);
    }
    for (i, v) in ce.eig_b_minus_a.iter().enumerate() {
        out.push(Some((i + 1) as f64), None, "eig_b_minus_a", *v);
    }
    out.push(
        None,
        Some(1.0),
        "semigroup_min_eigenvalue",
        report.semigroup_min_eigenvalue,
    );
    for check in &report.resolvents {
        out.push(
            Some(check.gamma),
            None,
            "resolvent_min_eigenvalue",
            check.min_eigenvalue,
        );
    }
    if !report.dominates() {
        out.flag(Flag::HypothesisViolation("B does not dominate A".into()));
    }
    Ok(out)
}

fn trace_family(ctx: &Context, family: &Family, dominator: &FormPair, target: &FormPair) -> Result<Outcome> {
    let result = trace_convergence_experiment(family, dominator, target, &ctx.t_grid)?;
    let mut out = Outcome::default();
    for report in &result.trace_norms {
        out.push_report(report);
    }
    out.push_report(&result.resolvent);
    for &i in &result.hypothesis_failures {
        out.flag(Flag::HypothesisViolation(format!(
            "domination fails for member {}",
            family.parameters[i]
        )));
    }
    Ok(out)
}

fn robin_to_neumann(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let family = family(ctx.list("k"), |k| gallery::robin(n, k))?;
    let neumann = gallery::neumann(n)?;
    trace_family(ctx, &family, &neumann, &neumann)
}

fn robin_to_neumann_interpolated(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let family = family(ctx.list("k"), |k| gallery::robin(n, k))?;
    let neumann = gallery::neumann(n)?;
    let fine = neumann.source().clone();
    let result = interpolated_convergence(
        &family,
        &neumann,
        &fine,
        ctx.scalar("theta")?,
        ctx.scalar("p")?,
        &ctx.t_grid,
    )?;
    let mut out = Outcome::default();
    out.push(None, None, "q", result.q);
    for report in result.values.iter().chain(&result.constants) {
        out.push_report(report);
    }
    out.push(None, None, "max_constant", result.max_constant);
    if result.fine_norm_warning {
        out.flag(Flag::HypothesisViolation(
            "semigroup norms into the fine space grow across the family".into(),
        ));
    }
    Ok(out)
}

fn dtn_trace_convergence(ctx: &Context) -> Result<Outcome> {
    let sizes = ctx.counts("n", 2)?;
    let members = sizes
        .iter()
        .map(|&n| {
            let inv = 1.0 / n as f64;
            build_dtn(n, 1.0 + inv, re(inv), None)
        })
        .collect::<Result<Vec<_>>>()?;
    let family = Family::new(sizes.iter().map(|&n| n as f64).collect(), members)?;
    let target = gallery::dtn(2, 0.0)?;
    trace_family(ctx, &family, &target, &target)
}

fn dtn_exactness(ctx: &Context) -> Result<Outcome> {
    let exact = CMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0].map(re));
    let mut out = Outcome::default();
    for n in ctx.counts("n", 2)? {
        let pair = gallery::dtn(n, 0.0)?;
        let op = associated_operator(&pair)?;
        let error = (op.matrix() - &exact).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let values = minimax_eigenvalues(&pair, 2)?;
        let p = Some(n as f64);
        out.push(p, None, "max_entry_error", error);
        out.push(p, None, "eigenvalue_1", values[0]);
        out.push(p, None, "eigenvalue_2", values[1]);
    }
    Ok(out)
}

fn dirichlet_spectrum(ctx: &Context) -> Result<Outcome> {
    let k_max = ctx.count("k_max", 1)?;
    let values = minimax_eigenvalues(&gallery::dirichlet(ctx.mesh)?, k_max)?;
    let mut out = Outcome::default();
    for (i, v) in values.iter().enumerate() {
        let k = (i + 1) as f64;
        let exact = (k * PI).powi(2);
        out.push(Some(k), None, "eigenvalue", *v);
        out.push(Some(k), None, "relative_error", (v - exact).abs() / exact);
    }
    Ok(out)
}

fn padded_eigenvalues(pair: &FormPair, k_max: usize) -> Result<Vec<f64>> {
    let mut values = minimax_eigenvalues(pair, k_max.min(pair.target().dim()))?;
    values.resize(k_max, f64::INFINITY);
    Ok(values)
}

fn comparison_triple_run(ctx: &Context) -> Result<Outcome> {
    let k_max = ctx.count("k_max", 1)?;
    let triple = comparison_triple(ctx.mesh, ctx.scalar("beta")?)?;
    let spectra = triple
        .iter()
        .map(|p| padded_eigenvalues(p, k_max))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    for (name, values) in ["lambda_a1", "lambda_a2", "lambda_a3"].iter().zip(&spectra) {
        for (i, v) in values.iter().enumerate() {
            out.push(Some((i + 1) as f64), None, *name, *v);
        }
    }
    for (i, ((l1, l2), l3)) in spectra[0].iter().zip(&spectra[1]).zip(&spectra[2]).enumerate() {
        let margin = l1.min(*l3) - l2;
        out.push(Some((i + 1) as f64), None, "ordering_margin", margin);
        if margin < -ctx.tol * (1.0 + l2.abs()) {
            out.flag(Flag::HypothesisViolation(format!(
                "lambda_{} of A2 exceeds min(A1, A3)",
                i + 1
            )));
        }
    }
    Ok(out)
}

fn multiplicative_monotonicity(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let k_max = ctx.count("k_max", 1)?;
    let weights = ctx.list("m");
    let pairs = weights
        .iter()
        .map(|&m| gallery::multiplicative(n, m))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    for (m, pair) in weights.iter().zip(&pairs) {
        for (i, v) in padded_eigenvalues(pair, k_max)?.iter().enumerate() {
            out.push(Some(*m), None, format!("lambda_{}", i + 1), *v);
        }
    }
    for (w, p) in weights.windows(2).zip(pairs.windows(2)) {
        match eigenvalue_domination(&p[0], &p[1], &Inclusion::identity(n - 1), k_max) {
            Ok(report) if report.holds() => {}
            Ok(report) => out.flag(Flag::HypothesisViolation(format!(
                "eigenvalues decrease from m = {} to m = {} at k = {:?}",
                w[0], w[1], report.violations
            ))),
            Err(FormError::HypothesisViolated { reason, .. }) => out.flag(Flag::HypothesisViolation(format!(
                "m = {} to m = {}: {reason}",
                w[0], w[1]
            ))),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn multiplicative_convergence(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let limit = ctx.scalar("m_limit")?;
    // Members are indexed by their distance to the limit weight.
    let distances: Vec<f64> = ctx.list("m").iter().map(|m| (m - limit).abs()).collect();
    let weights = ctx.list("m").to_vec();
    let members = weights
        .iter()
        .map(|&m| gallery::multiplicative(n, m))
        .collect::<Result<Vec<_>>>()?;
    let family = Family::new(distances, members)?;
    let target = gallery::multiplicative(n, limit)?;
    let dominator = build_interval_model(&IntervalModelSpec::new(n, BoundaryCondition::Dirichlet).with_alpha(0.25))?;
    trace_family(ctx, &family, &dominator, &target)
}

fn wentzell_family(ctx: &Context, vary: &str) -> Result<Family> {
    let n = ctx.mesh;
    if vary == "sigma" {
        let rho = ctx.scalar("rho")?;
        family(ctx.list("sigma"), |s| gallery::wentzell(n, rho, s))
    } else {
        let sigma = ctx.scalar("sigma")?;
        family(ctx.list("rho"), |r| gallery::wentzell(n, r, sigma))
    }
}

/// Coordinates of `L² × ℂ²` on the Wentzell space: interior nodes, then the two endpoints.
fn interior_profile(n: usize) -> CVector {
    CVector::from_fn(n + 1, |i, _| {
        if i < n - 1 {
            re(((i + 1) as f64 * PI / n as f64).sin())
        } else {
            re(0.0)
        }
    })
}

fn boundary_probe(n: usize) -> CVector {
    CVector::from_fn(n + 1, |i, _| re(if i >= n - 1 { 1.0 } else { 0.0 }))
}

fn mosco_rows(out: &mut Outcome, report: &MoscoReport) {
    for probe in &report.probes {
        for (i, p) in report.parameters.iter().enumerate() {
            out.push(Some(*p), None, "phi", probe.phi[i]);
            out.push(Some(*p), None, "recovery_gap", probe.recovery_gap[i]);
            if let Some(errors) = &probe.resolvent_error {
                out.push(Some(*p), None, "resolvent_error", errors[i]);
            }
        }
        for (w, c) in report.parameters.windows(2).zip(&probe.cauchy) {
            out.push(Some(w[1]), None, "cauchy_gap", *c);
        }
        out.push(None, None, "gap_floor", probe.gap_floor);
    }
    if report.non_convergence() {
        out.flag(Flag::NonConvergence(report.note.to_string()));
    }
}

fn wentzell_sigma_infinity(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let family = wentzell_family(ctx, "sigma")?;
    let target = gallery::dirichlet_plus_zero(n)?;
    let mut probe = interior_profile(n);
    probe[n - 1] = re(1.0);
    probe[n] = re(-0.5);
    let report = mosco_surrogate(&family, Some(&target), &[probe], MoscoOptions::default())?;
    let mut out = Outcome::default();
    mosco_rows(&mut out, &report);
    Ok(out)
}

fn wentzell_sigma_zero(ctx: &Context) -> Result<Outcome> {
    let family = wentzell_family(ctx, "sigma")?;
    let report = mosco_surrogate(&family, None, &[boundary_probe(ctx.mesh)], MoscoOptions::default())?;
    let mut out = Outcome::default();
    mosco_rows(&mut out, &report);
    Ok(out)
}

fn wentzell_rho_zero(ctx: &Context) -> Result<Outcome> {
    let family = wentzell_family(ctx, "rho")?;
    let report = mosco_surrogate(&family, None, &[interior_profile(ctx.mesh)], MoscoOptions::default())?;
    let mut out = Outcome::default();
    mosco_rows(&mut out, &report);
    Ok(out)
}

fn push_sums(out: &mut Outcome, checkpoints: &[usize], sums: &[f64], t: Option<f64>, metric: &str) {
    for (cp, s) in checkpoints.iter().zip(sums) {
        out.push(Some(*cp as f64), t, metric, *s);
    }
    for (cp, w) in checkpoints.iter().skip(1).zip(sums.windows(2)) {
        out.push(Some(*cp as f64), t, format!("{metric}_increment"), w[1] - w[0]);
    }
}

fn checkpoints(ctx: &Context) -> Result<Vec<usize>> {
    let mut cps = ctx.counts("checkpoints", 1)?;
    if cps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FormError::InvalidParameter("checkpoints must be increasing".into()));
    }
    cps.dedup();
    Ok(cps)
}

fn gibbs(ctx: &Context, kind: DiagonalKind) -> Result<Outcome> {
    let cps = checkpoints(ctx)?;
    let model = DiagonalModel::new(kind, *cps.last().expect("non-empty"));
    let mut out = Outcome::default();
    for &t in &ctx.t_grid {
        let sums = partial_sums(&model.semigroup_singular_values(t), 1.0, &cps);
        push_sums(&mut out, &cps, &sums, Some(t), "semigroup_trace");
    }
    let sums = partial_sums(&model.resolvent_singular_values(), 1.0, &cps);
    push_sums(&mut out, &cps, &sums, None, "resolvent_trace");
    Ok(out)
}

fn gibbs_log_squared(ctx: &Context) -> Result<Outcome> {
    gibbs(ctx, DiagonalKind::LogSquared)
}

fn gibbs_log_plain(ctx: &Context) -> Result<Outcome> {
    gibbs(ctx, DiagonalKind::LogPlain)
}

fn sine_schatten(ctx: &Context) -> Result<Outcome> {
    let alpha = ctx.scalar("alpha")?;
    if !(alpha >= 1.0) {
        return Err(FormError::InvalidParameter(format!("alpha must be >= 1, got {alpha}")));
    }
    let cps = checkpoints(ctx)?;
    let model = DiagonalModel::new(DiagonalKind::Sine { alpha }, *cps.last().expect("non-empty"));
    let mut out = Outcome::default();
    for &t in &ctx.t_grid {
        let values = model.sine_singular_values(t);
        push_sums(
            &mut out,
            &cps,
            &partial_sums(&values, 2.0, &cps),
            Some(t),
            "sine_l2_squared",
        );
        push_sums(&mut out, &cps, &partial_sums(&values, 1.0, &cps), Some(t), "sine_l1");
    }
    Ok(out)
}

fn ultracontractivity(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let mut out = Outcome::default();
    let cases = [
        ("neumann", gallery::neumann(n)?, gallery::lumped_mass(n)),
        ("dirichlet", gallery::dirichlet(n)?, vec![1.0 / n as f64; n - 1]),
    ];
    for (name, pair, mass) in cases {
        let fit = ultracontractivity_exponent(&associated_operator(&pair)?, &mass, &ctx.t_grid)?;
        for (t, v) in fit.t.iter().zip(&fit.norms) {
            out.push(None, Some(*t), format!("norm_{name}"), *v);
        }
        out.push(None, None, format!("beta_{name}"), fit.beta);
        out.push(None, None, format!("constant_{name}"), fit.constant);
        out.push(None, None, format!("fit_residual_{name}"), fit.residual);
    }
    Ok(out)
}

fn resolvent_factorization(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let a0 = associated_operator(&gallery::robin(n, ctx.scalar("k0")?)?)?;
    let lambda = re(ctx.scalar("lambda")?);
    let mu = Complex64::new(ctx.scalar("mu_re")?, ctx.scalar("mu_im")?);
    let mut out = Outcome::default();
    for &k in ctx.list("k") {
        let an = associated_operator(&gallery::robin(n, k)?)?;
        out.push(
            Some(k),
            None,
            "relative_residual",
            factorization_identity_residual(&a0, &an, lambda, mu)?,
        );
    }
    Ok(out)
}

/// A fixed Hermitian generator on `ℂ⁴`.
fn coupling_generator() -> CMatrix {
    CMatrix::from_fn(4, 4, |i, j| {
        Complex64::new(1.0 / (1 + i + j) as f64, (i as f64 - j as f64) / 4.0)
    })
}

fn coupled_boundary(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    // Y couples u₁(0) with u₂(1) and u₂(0) with u₁(1).
    let y = CMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0].map(re));
    let generator = coupling_generator();
    let build = |y: CMatrix| -> Result<(CMatrix, InnerProductSpace)> {
        let op = associated_operator(&build_interval_model(&IntervalModelSpec::new(
            n,
            BoundaryCondition::Subspace { y },
        ))?)?;
        Ok((resolvent(&op, re(1.0))?.matrix, op.space().clone()))
    };
    let (target, h) = build(y.clone())?;
    let mut out = Outcome::default();
    for &theta in ctx.list("theta") {
        let (r, _) = build(rotated_subspace(&y, &generator, theta)?)?;
        out.push(
            Some(theta),
            None,
            "resolvent_difference",
            operator_norm(&(r - &target), &h, &h),
        );
    }
    Ok(out)
}

fn dtn_parabola(ctx: &Context) -> Result<Outcome> {
    let gamma_re = ctx.scalar("gamma_re")?;
    let mut out = Outcome::default();
    for &gamma_im in ctx.list("gamma_im") {
        let pair = build_dtn(ctx.mesh, 1.0, Complex64::new(gamma_re, gamma_im), None)?;
        let p = parabola_parameters(&pair)?;
        let x = Some(gamma_im);
        out.push(x, None, "m", p.m);
        out.push(x, None, "omega", p.omega);
        out.push(x, None, "mu", p.mu);
        out.push(x, None, "width", p.width);
    }
    Ok(out)
}

fn ehrling_trace(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let m = gallery::mass(n);
    let v = InnerProductSpace::new(gallery::stiffness(n, &vec![1.0; n]) + &m)?;
    let h = InnerProductSpace::new(m)?;
    let z = InnerProductSpace::euclidean(2);
    let t = CMatrix::identity(n + 1, n + 1);
    let s = gallery::trace_map(n);
    let mut out = Outcome::default();
    for &eps in ctx.list("epsilon") {
        let value = match ehrling_constant(&t, &s, &v, &h, &z, eps)? {
            formlab::forms::EhrlingConstant::Finite(c) => c,
            formlab::forms::EhrlingConstant::Infinite => f64::INFINITY,
        };
        out.push(Some(eps), None, "ehrling_constant", value);
    }
    Ok(out)
}

fn robin_domination(ctx: &Context) -> Result<Outcome> {
    let n = ctx.mesh;
    let neumann = gallery::neumann(n)?;
    let mut out = Outcome::default();
    for &k in ctx.list("k") {
        let report = check_domination(&gallery::robin(n, k)?, &neumann, ctx.list("gamma"))?;
        out.push(Some(k), None, "form_gap", report.form_gap);
        out.push(Some(k), None, "phi_gap", report.phi_gap);
        for check in &report.resolvents {
            out.push(
                Some(k),
                None,
                format!("resolvent_gap_gamma_{}", check.gamma),
                check.min_eigenvalue,
            );
        }
        out.push(Some(k), Some(1.0), "semigroup_gap", report.semigroup_min_eigenvalue);
        if !report.dominates() || !report.resolvents_ordered(ctx.tol * (1.0 + report.scale)) {
            out.flag(Flag::HypothesisViolation(format!(
                "Robin k = {k} is not ordered above Neumann"
            )));
        }
    }
    Ok(out)
}
