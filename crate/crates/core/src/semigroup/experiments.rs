//! Convergence experiments over families of form pairs.
//!
//! Families are processed in parallel with rayon; results are collected in
//! family order, so every report is identical to a sequential run.

use rayon::prelude::*;

use super::{interpolation_space, operator_norm, schatten_norm, three_factor_constant, Semigroup};
use crate::error::{FormError, Result};
use crate::forms::{associated_operator, check_domination, phi_functional_batch, AssociatedOperator, FormPair};
use crate::linalg::{self, CMatrix, CVector};
use crate::space::InnerProductSpace;

/// A one-parameter family of pairs sharing the reference space `H`.
#[derive(Debug, Clone)]
pub struct Family {
    pub parameters: Vec<f64>,
    pub members: Vec<FormPair>,
}

impl Family {
    pub fn new(parameters: Vec<f64>, members: Vec<FormPair>) -> Result<Self> {
        if parameters.len() != members.len() || members.is_empty() {
            return Err(FormError::InvalidParameter(format!(
                "family needs one parameter per member, got {} parameters for {} members",
                parameters.len(),
                members.len()
            )));
        }
        let h = members[0].target();
        if members.iter().any(|m| !m.target().same_as(h, 1e-12)) {
            return Err(FormError::Dimension(
                "family members have different reference spaces".into(),
            ));
        }
        Ok(Self { parameters, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn space(&self) -> &InnerProductSpace {
        self.members[0].target()
    }

    fn require_symmetric(&self) -> Result<()> {
        if self.members.iter().all(FormPair::is_symmetric) {
            Ok(())
        } else {
            Err(FormError::NotSymmetric)
        }
    }
}

/// Least-squares fit of `log y = log c + exponent · log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub log_constant: f64,
    /// Root-mean-square residual in `log y`.
    pub residual: f64,
}

/// Returns `None` unless there are two distinct positive abscissae and all
/// ordinates are positive.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Option<PowerFit> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let exponent = sxy / sxx;
    let log_constant = my - exponent * mx;
    let residual = (lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - log_constant - exponent * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Some(PowerFit {
        exponent,
        log_constant,
        residual,
    })
}

/// One metric tabulated against the family parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub metric: String,
    pub t: Option<f64>,
    pub parameter: Vec<f64>,
    pub values: Vec<f64>,
    /// Log-log slope of `values` against `parameter`, when all are positive.
    pub fitted_rate: Option<f64>,
}

impl ConvergenceReport {
    pub fn new(metric: impl Into<String>, t: Option<f64>, parameter: Vec<f64>, values: Vec<f64>) -> Self {
        let fitted_rate = fit_power_law(&parameter, &values).map(|f| f.exponent);
        Self {
            metric: metric.into(),
            t,
            parameter,
            values,
            fitted_rate,
        }
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] < w[0])
    }

    /// `values[n+1] / values[n]`.
    pub fn ratios(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct TraceConvergence {
    /// `‖e^{-tAₙ} - e^{-tA}‖_{L_1(H)}`, one report per `t`.
    pub trace_norms: Vec<ConvergenceReport>,
    /// `‖(1 + Aₙ)⁻¹ - (1 + A)⁻¹‖_{H→H}`.
    pub resolvent: ConvergenceReport,
    /// Family indices whose domination hypothesis `(b, j) ≤ (aₙ, jₙ)` failed.
    pub hypothesis_failures: Vec<usize>,
}

impl TraceConvergence {
    pub fn warning(&self) -> bool {
        !self.hypothesis_failures.is_empty()
    }
}

fn resolvent_at_one(op: &AssociatedOperator) -> Result<CMatrix> {
    super::resolvent(op, linalg::re(1.0)).map(|r| r.matrix)
}

pub fn trace_convergence_experiment(
    family: &Family,
    dominator: &FormPair,
    target: &FormPair,
    t_grid: &[f64],
) -> Result<TraceConvergence> {
    family.require_symmetric()?;
    if !dominator.is_symmetric() || !target.is_symmetric() {
        return Err(FormError::NotSymmetric);
    }
    let h = family.space().clone();
    let target_op = associated_operator(target)?;
    let target_sg = Semigroup::new(&target_op);
    let target_at: Vec<CMatrix> = t_grid.iter().map(|&t| target_sg.at(t)).collect::<Result<_>>()?;
    let target_res = resolvent_at_one(&target_op)?;

    let rows: Vec<(bool, Vec<f64>, f64)> = family
        .members
        .par_iter()
        .map(|member| -> Result<(bool, Vec<f64>, f64)> {
            let dominated = check_domination(member, dominator, &[1.0])?.dominates();
            let op = associated_operator(member)?;
            let sg = Semigroup::new(&op);
            let norms = t_grid
                .iter()
                .zip(&target_at)
                .map(|(&t, reference)| Ok(schatten_norm(&(sg.at(t)? - reference), 1.0, &h, &h)?.value))
                .collect::<Result<Vec<f64>>>()?;
            let res = operator_norm(&(resolvent_at_one(&op)? - &target_res), &h, &h);
            Ok((dominated, norms, res))
        })
        .collect::<Result<_>>()?;

    let trace_norms = t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            ConvergenceReport::new(
                "trace_norm",
                Some(t),
                family.parameters.clone(),
                rows.iter().map(|r| r.1[k]).collect(),
            )
        })
        .collect();
    let resolvent = ConvergenceReport::new(
        "resolvent_norm",
        None,
        family.parameters.clone(),
        rows.iter().map(|r| r.2).collect(),
    );
    let hypothesis_failures = rows.iter().enumerate().filter(|(_, r)| !r.0).map(|(i, _)| i).collect();
    Ok(TraceConvergence {
        trace_norms,
        resolvent,
        hypothesis_failures,
    })
}

#[derive(Debug, Clone)]
pub struct InterpolatedConvergence {
    pub q: f64,
    /// `‖e^{-tAₙ} - e^{-tA}‖_{L_q(H, H_θ)}`, one report per `t`.
    pub values: Vec<ConvergenceReport>,
    /// Fitted three-factor constant per `t` and family member.
    pub constants: Vec<ConvergenceReport>,
    pub max_constant: f64,
    /// `‖e^{-tAₙ}‖_{H→H̃}` grew by more than a factor 10 across the family.
    pub fine_norm_warning: bool,
}

pub fn interpolated_convergence(
    family: &Family,
    target: &FormPair,
    fine: &InnerProductSpace,
    theta: f64,
    p: f64,
    t_grid: &[f64],
) -> Result<InterpolatedConvergence> {
    if !(p >= 1.0) {
        return Err(FormError::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let h = family.space().clone();
    let q = 1.0 / (theta / p + (1.0 - theta));
    let h_theta = interpolation_space(&h, fine, theta)?.space()?;
    let target_op = associated_operator(target)?;
    let target_sg = Semigroup::new(&target_op);
    let target_at: Vec<CMatrix> = t_grid.iter().map(|&t| target_sg.at(t)).collect::<Result<_>>()?;

    // Per member: per t (value, constant, fine operator norm).
    let rows: Vec<Vec<(f64, f64, f64)>> = family
        .members
        .par_iter()
        .map(|member| -> Result<Vec<(f64, f64, f64)>> {
            let op = associated_operator(member)?;
            let sg = Semigroup::new(&op);
            t_grid
                .iter()
                .zip(&target_at)
                .map(|(&t, reference)| {
                    let at = sg.at(t)?;
                    let d = &at - reference;
                    let value = schatten_norm(&d, q, &h, &h_theta)?.value;
                    let constant = three_factor_constant(&d, &h, fine, theta, p)?;
                    Ok((value, constant, operator_norm(&at, &h, fine)))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut values = Vec::new();
    let mut constants = Vec::new();
    let mut fine_norm_warning = false;
    for (k, &t) in t_grid.iter().enumerate() {
        values.push(ConvergenceReport::new(
            "interpolated_norm",
            Some(t),
            family.parameters.clone(),
            rows.iter().map(|r| r[k].0).collect(),
        ));
        constants.push(ConvergenceReport::new(
            "three_factor_constant",
            Some(t),
            family.parameters.clone(),
            rows.iter().map(|r| r[k].1).collect(),
        ));
        let first = rows.first().map(|r| r[k].2).unwrap_or(0.0);
        let last = rows.last().map(|r| r[k].2).unwrap_or(0.0);
        if last > 10.0 * first {
            fine_norm_warning = true;
        }
    }
    let max_constant = rows.iter().flat_map(|r| r.iter().map(|c| c.1)).fold(0.0f64, f64::max);
    Ok(InterpolatedConvergence {
        q,
        values,
        constants,
        max_constant,
        fine_norm_warning,
    })
}

#[derive(Debug, Clone)]
pub struct UltracontractivityFit {
    /// `β` in `‖e^{-tA}‖_{L²→L^∞} ≈ c t^{-β}`.
    pub beta: f64,
    pub constant: f64,
    /// Root-mean-square residual in `log ‖·‖`.
    pub residual: f64,
    pub t: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Spectral weights below this fraction of the leading one are dropped.
const MODE_CUTOFF: f64 = 1e-18;

/// `‖e^{-tA}‖_{L²→L^∞} = max_i (Σ_j |T_ij|² / m_j)^{1/2}` with lumped masses `m`,
/// fitted to `c t^{-β}`.
pub fn ultracontractivity_exponent(
    op: &AssociatedOperator,
    mass_diag: &[f64],
    t_grid: &[f64],
) -> Result<UltracontractivityFit> {
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(FormError::InvalidParameter(
            "ultracontractivity times must be positive".into(),
        ));
    }
    if mass_diag.len() != op.dim() || mass_diag.iter().any(|&m| !(m > 0.0)) {
        return Err(FormError::InvalidParameter(format!(
            "need {} positive lumped masses, got {}",
            op.dim(),
            mass_diag.len()
        )));
    }
    let sg = Semigroup::new(op);
    let inv_mass: Vec<f64> = mass_diag.iter().map(|m| 1.0 / m).collect();
    let norms: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| -> Result<f64> {
            let rows = match sg.factors() {
                Some((values, right, left)) => truncated_row_norms(values, right, left, &inv_mass, t),
                None => full_row_norms(&sg.at(t)?, &inv_mass),
            };
            Ok(rows.into_iter().fold(0.0, f64::max).sqrt())
        })
        .collect::<Result<_>>()?;
    let fit = if t_grid.len() >= 2 {
        fit_power_law(t_grid, &norms).ok_or_else(|| FormError::InvalidParameter("degenerate time grid".into()))?
    } else {
        PowerFit {
            exponent: 0.0,
            log_constant: norms[0].ln(),
            residual: 0.0,
        }
    };
    Ok(UltracontractivityFit {
        beta: -fit.exponent,
        constant: fit.log_constant.exp(),
        residual: fit.residual,
        t: t_grid.to_vec(),
        norms,
    })
}

fn full_row_norms(t: &CMatrix, inv_mass: &[f64]) -> Vec<f64> {
    (0..t.nrows())
        .map(|i| (0..t.ncols()).map(|j| t[(i, j)].norm_sqr() * inv_mass[j]).sum())
        .collect()
}

/// Row norms of `R diag(e^{-tλ}) L M⁻¹ (…)*` keeping only modes with
/// non-negligible weight.
fn truncated_row_norms(values: &[f64], right: &CMatrix, left: &CMatrix, inv_mass: &[f64], t: f64) -> Vec<f64> {
    let lead = values.iter().copied().fold(f64::INFINITY, f64::min);
    let keep: Vec<usize> = (0..values.len())
        .filter(|&k| (-t * (values[k] - lead)).exp() > MODE_CUTOFF)
        .collect();
    let weights: Vec<f64> = keep.iter().map(|&k| (-t * values[k]).exp()).collect();
    let mut r = right.select_columns(&keep);
    for (c, mut col) in r.column_iter_mut().enumerate() {
        col *= linalg::re(weights[c]);
    }
    let l = left.select_rows(&keep);
    let mut l_scaled = l.clone();
    for (j, mut col) in l_scaled.column_iter_mut().enumerate() {
        col *= linalg::re(inv_mass[j]);
    }
    let coupling = linalg::mul(&l_scaled, &l.adjoint());
    let rc = linalg::mul(&r, &coupling);
    (0..r.nrows())
        .map(|i| {
            rc.row(i)
                .iter()
                .zip(r.row(i).iter())
                .map(|(a, b)| (a * b.conj()).re)
                .sum::<f64>()
                .max(0.0)
        })
        .collect()
}

pub const MOSCO_NOTE: &str =
    "finite-sample surrogate: agreement on finitely many probes and family members is not a proof of Mosco convergence";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoscoOptions {
    /// Energy budget `E` of the recovery gap `dₙ(x; E) = min { ‖y - x‖_H : φₙ(y) ≤ E }`.
    pub energy: f64,
    /// Flag non-convergence when the recovery gap stays at or above this value.
    pub delta: Option<f64>,
}

impl Default for MoscoOptions {
    fn default() -> Self {
        Self {
            energy: 1.0,
            delta: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MoscoProbe {
    pub phi: Vec<f64>,
    pub phi_target: Option<f64>,
    /// `‖(1 + Aₙ)⁻¹x - (1 + A)⁻¹x‖_H` when a target is given.
    pub resolvent_error: Option<Vec<f64>>,
    /// `‖(1 + Aₙ₊₁)⁻¹x - (1 + Aₙ)⁻¹x‖_H`.
    pub cauchy: Vec<f64>,
    pub recovery_gap: Vec<f64>,
    pub gap_floor: f64,
    pub phi_diverges: bool,
    pub cauchy_fails: bool,
    pub non_convergence: bool,
}

#[derive(Debug, Clone)]
pub struct MoscoReport {
    pub parameters: Vec<f64>,
    pub probes: Vec<MoscoProbe>,
    pub note: &'static str,
}

impl MoscoReport {
    pub fn non_convergence(&self) -> bool {
        self.probes.iter().any(|p| p.non_convergence)
    }
}

struct MemberData {
    phi: Vec<f64>,
    resolved: Vec<CVector>,
    gaps: Vec<f64>,
}

pub fn mosco_surrogate(
    family: &Family,
    target: Option<&FormPair>,
    probes: &[CVector],
    options: MoscoOptions,
) -> Result<MoscoReport> {
    family.require_symmetric()?;
    if !(options.energy > 0.0) {
        return Err(FormError::InvalidParameter(
            "recovery energy budget must be positive".into(),
        ));
    }
    let h = family.space().clone();
    let n = h.dim();
    if probes.iter().any(|x| x.len() != n) {
        return Err(FormError::Dimension(format!("probes must have length {n}")));
    }
    let probe_matrix = CMatrix::from_fn(n, probes.len(), |i, k| probes[k][i]);

    let per_member = |pair: &FormPair| -> Result<MemberData> {
        let op = associated_operator(pair)?;
        let phi = phi_functional_batch(pair, &probe_matrix)?;
        let res = resolvent_at_one(&op)?;
        let resolved = probes.iter().map(|x| &res * x).collect();
        let gaps = probes.iter().map(|x| recovery_gap(&op, x, options.energy)).collect();
        Ok(MemberData { phi, resolved, gaps })
    };

    let members: Vec<MemberData> = family.members.par_iter().map(per_member).collect::<Result<_>>()?;
    let reference = match target {
        Some(pair) => {
            if !pair.is_symmetric() {
                return Err(FormError::NotSymmetric);
            }
            if !pair.target().same_as(&h, 1e-12) {
                return Err(FormError::Dimension("target acts on a different space".into()));
            }
            Some(per_member(pair)?)
        }
        None => None,
    };

    let probes_out = (0..probes.len())
        .map(|k| {
            let phi: Vec<f64> = members.iter().map(|m| m.phi[k]).collect();
            let recovery_gap: Vec<f64> = members.iter().map(|m| m.gaps[k]).collect();
            let cauchy: Vec<f64> = members
                .windows(2)
                .map(|w| h.norm(&(&w[1].resolved[k] - &w[0].resolved[k])))
                .collect();
            let resolvent_error = reference.as_ref().map(|r| {
                members
                    .iter()
                    .map(|m| h.norm(&(&m.resolved[k] - &r.resolved[k])))
                    .collect::<Vec<f64>>()
            });
            let gap_floor = recovery_gap.iter().copied().fold(f64::INFINITY, f64::min);
            let phi_diverges = diverges(&phi);
            let cauchy_fails = match (cauchy.first(), cauchy.last()) {
                (Some(&first), Some(&last)) if cauchy.len() >= 2 => {
                    last > (0.5 * first).max(1e-12 * h.norm(&probes[k]))
                }
                _ => false,
            };
            let gap_flag = options.delta.is_some_and(|d| gap_floor >= d);
            MoscoProbe {
                phi,
                phi_target: reference.as_ref().map(|r| r.phi[k]),
                resolvent_error,
                cauchy,
                recovery_gap,
                gap_floor,
                phi_diverges,
                cauchy_fails,
                non_convergence: phi_diverges || cauchy_fails || gap_flag,
            }
        })
        .collect();
    Ok(MoscoReport {
        parameters: family.parameters.clone(),
        probes: probes_out,
        note: MOSCO_NOTE,
    })
}

/// Non-decreasing over the last three members and at least 100 times the first value.
fn diverges(values: &[f64]) -> bool {
    if values.len() < 3 {
        return false;
    }
    let tail = &values[values.len() - 3..];
    let first = values[0].abs().max(f64::MIN_POSITIVE);
    tail.windows(2).all(|w| w[1] >= w[0]) && values[values.len() - 1] >= 100.0 * first
}

/// `min { ‖y - x‖_H : ⟨Ay, y⟩ ≤ E }`, attained at `y = (I + τA)⁻¹x`.
pub(crate) fn recovery_gap(op: &AssociatedOperator, x: &CVector, energy: f64) -> f64 {
    let h = op.space();
    let reduced = linalg::congruence_inv(h.factor(), op.form_on_h());
    let eig = linalg::hermitian_eigen(&reduced);
    let coords = eig.vectors.adjoint() * (h.factor().adjoint() * x);
    let weights: Vec<(f64, f64)> = eig
        .values
        .iter()
        .zip(coords.iter())
        .map(|(&l, c)| (l.max(0.0), c.norm_sqr()))
        .collect();
    let phi = |tau: f64| -> f64 { weights.iter().map(|&(l, w)| l * w / (1.0 + tau * l).powi(2)).sum() };
    if phi(0.0) <= energy {
        return 0.0;
    }
    let (mut lo, mut hi) = (-60.0f64, 60.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid.exp()) > energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = hi.exp();
    weights
        .iter()
        .map(|&(l, w)| w * (tau * l / (1.0 + tau * l)).powi(2))
        .sum::<f64>()
        .sqrt()
}
