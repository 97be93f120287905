//! Diagonal operators on `ℓ²`, truncated to `N` terms and indexed from `n = 1`.

use std::f64::consts::PI;

use crate::error::Result;
use crate::forms::AssociatedOperator;
use crate::linalg;
use crate::space::InnerProductSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalKind {
    /// `λₙ = log² n`: `e^{-tA}` is trace class for every `t > 0`.
    LogSquared,
    /// `λₙ = log n`: `e^{-tA}` has singular values `n^{-t}`, trace class only for `t > 1`.
    LogPlain,
    /// `λₙ = -ωₙ²`, `ωₙ = π/2 + 2π ⌊n^α⌋`, with sine function `S(t) = sin(ωₙ t)/ωₙ`.
    Sine { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalModel {
    pub kind: DiagonalKind,
    pub n: usize,
}

impl DiagonalModel {
    pub fn new(kind: DiagonalKind, n: usize) -> Self {
        Self { kind, n }
    }

    fn indices(&self) -> impl Iterator<Item = f64> {
        (1..=self.n).map(|k| k as f64)
    }

    /// `ωₙ = π/2 + 2π ⌊n^α⌋` (sine model only; empty otherwise).
    pub fn frequencies(&self) -> Vec<f64> {
        match self.kind {
            DiagonalKind::Sine { alpha } => self
                .indices()
                .map(|k| PI / 2.0 + 2.0 * PI * k.powf(alpha).floor())
                .collect(),
            _ => Vec::new(),
        }
    }

    /// The sequence `λₙ` as written in the model definition.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.kind {
            DiagonalKind::LogSquared => self.indices().map(|k| k.ln().powi(2)).collect(),
            DiagonalKind::LogPlain => self.indices().map(f64::ln).collect(),
            DiagonalKind::Sine { .. } => self.frequencies().iter().map(|w| -w * w).collect(),
        }
    }

    /// Eigenvalues of the positive operator `A`: `λₙ` for the log models and
    /// `-λₙ = ωₙ²` for the sine model.
    pub fn generator_eigenvalues(&self) -> Vec<f64> {
        match self.kind {
            DiagonalKind::Sine { .. } => self.eigenvalues().iter().map(|l| -l).collect(),
            _ => self.eigenvalues(),
        }
    }

    /// Singular values of `e^{-tA}`.
    pub fn semigroup_singular_values(&self, t: f64) -> Vec<f64> {
        self.generator_eigenvalues().iter().map(|l| (-t * l).exp()).collect()
    }

    /// Singular values of `(1 + A)⁻¹`.
    pub fn resolvent_singular_values(&self) -> Vec<f64> {
        self.generator_eigenvalues().iter().map(|l| 1.0 / (1.0 + l)).collect()
    }

    /// Singular values `|sin(ωₙ t)| / ωₙ` of the sine function (sine model only).
    pub fn sine_singular_values(&self, t: f64) -> Vec<f64> {
        self.frequencies().iter().map(|w| (w * t).sin().abs() / w).collect()
    }

    /// The truncated operator `A` on `ℂ^N` with the Euclidean inner product.
    pub fn operator(&self) -> Result<AssociatedOperator> {
        AssociatedOperator::from_matrix(
            InnerProductSpace::euclidean(self.n),
            linalg::real_diag(&self.generator_eigenvalues()),
        )
    }
}

/// `Σ_{n ≤ N} sₙᵖ` at each checkpoint `N` (ascending, at most `values.len()`).
pub fn partial_sums(values: &[f64], p: f64, checkpoints: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut acc = 0.0;
    let mut done = 0;
    for &cp in checkpoints {
        let cp = cp.min(values.len());
        for s in &values[done.min(cp)..cp] {
            acc += s.abs().powf(p);
        }
        done = done.max(cp);
        out.push(acc);
    }
    out
}
