//! P1 finite elements on a uniform mesh of `(0, 1)` and the form pairs built
//! from them.
//!
//! Nodes are `x_i = i h`, `h = 1/n`, `i = 0..=n`. Coefficients are constant
//! on each cell (sampled at the midpoint). Every model uses the discrete `H¹`
//! Gram `K + M` on `V`.

use num_complex::Complex64;

use crate::error::{FormError, Result};
use crate::forms::{FormPair, SesquilinearForm};
use crate::linalg::{self, CMatrix};
use crate::space::InnerProductSpace;

/// Per-cell coefficients: diffusion `α > 0`, potential `γ` and weight `m > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub alpha: Vec<f64>,
    pub gamma: Vec<Complex64>,
    pub m: Vec<f64>,
}

impl Coefficients {
    pub fn constant(n: usize, alpha: f64, gamma: Complex64, m: f64) -> Self {
        Self {
            alpha: vec![alpha; n],
            gamma: vec![gamma; n],
            m: vec![m; n],
        }
    }

    /// Samples each coefficient at the cell midpoints.
    pub fn sampled(
        n: usize,
        alpha: impl Fn(f64) -> f64,
        gamma: impl Fn(f64) -> Complex64,
        m: impl Fn(f64) -> f64,
    ) -> Self {
        let mid = |c: usize| (c as f64 + 0.5) / n as f64;
        Self {
            alpha: (0..n).map(|c| alpha(mid(c))).collect(),
            gamma: (0..n).map(|c| gamma(mid(c))).collect(),
            m: (0..n).map(|c| m(mid(c))).collect(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.alpha.len() != n || self.gamma.len() != n || self.m.len() != n {
            return Err(FormError::InvalidParameter(format!(
                "coefficients must have one value per cell ({n})"
            )));
        }
        if self.alpha.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(FormError::InvalidParameter("alpha must be positive and finite".into()));
        }
        if self.m.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(FormError::InvalidParameter("m must be positive and finite".into()));
        }
        if self.gamma.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return Err(FormError::InvalidParameter("gamma must be finite".into()));
        }
        Ok(())
    }

    fn unit_weight(&self) -> bool {
        self.m.iter().all(|&m| m == 1.0)
    }

    /// Nodal weights: the mean of the adjacent cell values.
    fn nodal_m(&self) -> Vec<f64> {
        let n = self.m.len();
        (0..=n)
            .map(|i| match i {
                0 => self.m[0],
                i if i == n => self.m[n - 1],
                i => 0.5 * (self.m[i - 1] + self.m[i]),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// `V = H¹₀`, `H = L²`, `j(u) = u/m`.
    Dirichlet,
    /// `V = H¹`, `H = L²`, `j(u) = u/m`.
    Neumann,
    /// Neumann plus `k (u(0) v̄(0) + u(1) v̄(1))`.
    Robin { k: f64 },
    /// `V = H¹`, `H = L² × ℂ²`, `j(u) = (ρ u, σ u|∂)`.
    Wentzell { rho: f64, sigma: f64 },
    /// `k`-component functions with boundary values in `Y ⊂ ℂ^{2k}`
    /// (columns of `y` span `Y`; rows ordered `u(0)` then `u(1)`), `H = L²(0,1; ℂᵏ)`.
    Subspace { y: CMatrix },
    /// `V = H¹`, `H = ℂ²`, `j` = trace, optional boundary term `β₀|u(0)|² + β₁|u(1)|²`.
    Dtn { beta: Option<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalModelSpec {
    pub n: usize,
    pub bc: BoundaryCondition,
    pub coefficients: Coefficients,
}

impl IntervalModelSpec {
    /// `α ≡ 1`, `γ ≡ 0`, `m ≡ 1`.
    pub fn new(n: usize, bc: BoundaryCondition) -> Self {
        Self {
            n,
            bc,
            coefficients: Coefficients::constant(n, 1.0, Complex64::new(0.0, 0.0), 1.0),
        }
    }

    pub fn with_coefficients(mut self, coefficients: Coefficients) -> Self {
        self.coefficients = coefficients;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.coefficients.alpha = vec![alpha; self.n];
        self
    }

    pub fn with_gamma(mut self, gamma: Complex64) -> Self {
        self.coefficients.gamma = vec![gamma; self.n];
        self
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.coefficients.m = vec![m; self.n];
        self
    }
}

/// `∫ α u' v̄'` on the full nodal space, `(n+1) x (n+1)`.
pub fn stiffness(n: usize, alpha: &[f64]) -> CMatrix {
    let h = 1.0 / n as f64;
    let mut k = CMatrix::zeros(n + 1, n + 1);
    for (c, &a) in alpha.iter().enumerate() {
        let w = linalg::re(a / h);
        k[(c, c)] += w;
        k[(c + 1, c + 1)] += w;
        k[(c, c + 1)] -= w;
        k[(c + 1, c)] -= w;
    }
    k
}

/// `∫ w u v̄` on the full nodal space with cellwise weight `w`.
pub fn weighted_mass(n: usize, weight: &[Complex64]) -> CMatrix {
    let h = 1.0 / n as f64;
    let mut m = CMatrix::zeros(n + 1, n + 1);
    for (c, &w) in weight.iter().enumerate() {
        let diag = w * (h / 3.0);
        let off = w * (h / 6.0);
        m[(c, c)] += diag;
        m[(c + 1, c + 1)] += diag;
        m[(c, c + 1)] += off;
        m[(c + 1, c)] += off;
    }
    m
}

/// The `L²` mass matrix, `(h/6) tridiag(1, 4, 1)` with halved corners.
pub fn mass(n: usize) -> CMatrix {
    weighted_mass(n, &vec![linalg::re(1.0); n])
}

/// Row sums of the mass matrix: `h/2` at the endpoints, `h` inside.
pub fn lumped_mass(n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (0..=n).map(|i| if i == 0 || i == n { 0.5 * h } else { h }).collect()
}

/// `u(0) v̄(0) + u(1) v̄(1)`.
pub fn boundary_mass(n: usize) -> CMatrix {
    let mut e = CMatrix::zeros(n + 1, n + 1);
    e[(0, 0)] = linalg::re(1.0);
    e[(n, n)] = linalg::re(1.0);
    e
}

/// Rows and columns `1..n` (the interior nodes).
pub fn interior(m: &CMatrix) -> CMatrix {
    let n = m.nrows() - 1;
    m.view((1, 1), (n - 1, n - 1)).into_owned()
}

/// The endpoint trace `u ↦ (u(0), u(1))`.
pub fn trace_map(n: usize) -> CMatrix {
    let mut j = CMatrix::zeros(2, n + 1);
    j[(0, 0)] = linalg::re(1.0);
    j[(1, n)] = linalg::re(1.0);
    j
}

/// Smallest eigenvalue of `∫ α u' v̄'` against `∫ |u|²` on `H¹₀` (discrete).
pub fn dirichlet_ground_state(n: usize, alpha: &[f64]) -> f64 {
    let k = interior(&stiffness(n, alpha));
    let m = interior(&mass(n));
    linalg::min_generalized_eigenvalue(&k, &m).expect("mass matrix is positive definite")
}

fn form(space: InnerProductSpace, matrix: CMatrix) -> Result<SesquilinearForm> {
    SesquilinearForm::detect(space, matrix)
}

pub fn build_interval_model(spec: &IntervalModelSpec) -> Result<FormPair> {
    let n = spec.n;
    if n < 2 {
        return Err(FormError::InvalidParameter(format!("mesh needs n >= 2 cells, got {n}")));
    }
    let coef = &spec.coefficients;
    coef.validate(n)?;
    let k = stiffness(n, &coef.alpha);
    let m = mass(n);
    let h1 = &stiffness(n, &vec![1.0; n]) + &m;
    let energy = &k + weighted_mass(n, &coef.gamma);
    if !coef.unit_weight()
        && !matches!(
            spec.bc,
            BoundaryCondition::Dirichlet | BoundaryCondition::Neumann | BoundaryCondition::Robin { .. }
        )
    {
        return Err(FormError::InvalidParameter(
            "a weight m is only supported with dirichlet, neumann and robin conditions".into(),
        ));
    }
    let inverse_weight = |nodes: std::ops::Range<usize>| {
        let nodal = coef.nodal_m();
        linalg::real_diag(&nodes.map(|i| 1.0 / nodal[i]).collect::<Vec<_>>())
    };

    match &spec.bc {
        BoundaryCondition::Dirichlet => {
            let v = InnerProductSpace::new(interior(&h1))?;
            let h = InnerProductSpace::new(interior(&m))?;
            FormPair::new(form(v, interior(&energy))?, inverse_weight(1..n), h)
        }
        BoundaryCondition::Neumann => {
            let v = InnerProductSpace::new(h1)?;
            FormPair::new(form(v, energy)?, inverse_weight(0..n + 1), InnerProductSpace::new(m)?)
        }
        BoundaryCondition::Robin { k: robin } => {
            if !robin.is_finite() {
                return Err(FormError::InvalidParameter("robin coefficient must be finite".into()));
            }
            let v = InnerProductSpace::new(h1)?;
            let s = energy + boundary_mass(n) * linalg::re(*robin);
            FormPair::new(form(v, s)?, inverse_weight(0..n + 1), InnerProductSpace::new(m)?)
        }
        BoundaryCondition::Wentzell { rho, sigma } => {
            if !(*rho > 0.0 && *sigma > 0.0) || !rho.is_finite() || !sigma.is_finite() {
                return Err(FormError::InvalidParameter(format!(
                    "wentzell needs rho, sigma > 0, got rho = {rho}, sigma = {sigma}"
                )));
            }
            let v = InnerProductSpace::new(h1)?;
            FormPair::new(form(v, energy)?, wentzell_map(n, *rho, *sigma), wentzell_space(n))
        }
        BoundaryCondition::Subspace { y } => build_subspace(n, coef, y),
        BoundaryCondition::Dtn { beta } => {
            let lambda_d = dirichlet_ground_state(n, &coef.alpha);
            let gamma_inf = coef.gamma.iter().map(|g| g.re).fold(f64::INFINITY, f64::min);
            if !(gamma_inf > -lambda_d) {
                return Err(FormError::InvalidParameter(format!(
                    "inf Re gamma = {gamma_inf} must exceed -lambda_1^D = {}",
                    -lambda_d
                )));
            }
            let mut s = energy;
            if let Some([b0, b1]) = beta {
                s[(0, 0)] += linalg::re(*b0);
                s[(n, n)] += linalg::re(*b1);
            }
            let v = InnerProductSpace::new(h1)?;
            FormPair::new(form(v, s)?, trace_map(n), InnerProductSpace::euclidean(2))
        }
    }
}

/// Dirichlet-to-Neumann pair with constant coefficients.
pub fn build_dtn(n: usize, alpha: f64, gamma: Complex64, beta: Option<[f64; 2]>) -> Result<FormPair> {
    build_interval_model(
        &IntervalModelSpec::new(n, BoundaryCondition::Dtn { beta })
            .with_alpha(alpha)
            .with_gamma(gamma),
    )
}

/// `L² × ℂ²` realized on interior nodes and the two endpoints: Gram `M_int ⊕ I`.
pub fn wentzell_space(n: usize) -> InnerProductSpace {
    let mi = interior(&mass(n));
    let mut g = CMatrix::zeros(n + 1, n + 1);
    g.view_mut((0, 0), (n - 1, n - 1)).copy_from(&mi);
    g[(n - 1, n - 1)] = linalg::re(1.0);
    g[(n, n)] = linalg::re(1.0);
    InnerProductSpace::new(g).expect("block Gram is positive definite")
}

/// `u ↦ (ρ u(x_1..x_{n-1}), σ u(0), σ u(1))`.
fn wentzell_map(n: usize, rho: f64, sigma: f64) -> CMatrix {
    let mut j = CMatrix::zeros(n + 1, n + 1);
    for i in 1..n {
        j[(i - 1, i)] = linalg::re(rho);
    }
    j[(n - 1, 0)] = linalg::re(sigma);
    j[(n, n)] = linalg::re(sigma);
    j
}

/// Limit pair `-Δ_D ⊕ 0` on the Wentzell space: `V = H¹₀ × ℂ²`,
/// `a((u, g), (v, k)) = ∫ u' v̄'`, `j = I`.
pub fn dirichlet_plus_zero(n: usize) -> Result<FormPair> {
    if n < 2 {
        return Err(FormError::InvalidParameter(format!("mesh needs n >= 2 cells, got {n}")));
    }
    let ki = interior(&stiffness(n, &vec![1.0; n]));
    let mi = interior(&mass(n));
    let mut gv = CMatrix::zeros(n + 1, n + 1);
    gv.view_mut((0, 0), (n - 1, n - 1)).copy_from(&(&ki + &mi));
    gv[(n - 1, n - 1)] = linalg::re(1.0);
    gv[(n, n)] = linalg::re(1.0);
    let mut s = CMatrix::zeros(n + 1, n + 1);
    s.view_mut((0, 0), (n - 1, n - 1)).copy_from(&ki);
    let v = InnerProductSpace::new(gv)?;
    FormPair::new(form(v, s)?, CMatrix::identity(n + 1, n + 1), wentzell_space(n))
}

fn build_subspace(n: usize, coef: &Coefficients, y: &CMatrix) -> Result<FormPair> {
    if y.nrows() == 0 || !y.nrows().is_multiple_of(2) {
        return Err(FormError::InvalidParameter(format!(
            "Y must live in C^(2k), got {} rows",
            y.nrows()
        )));
    }
    let comps = y.nrows() / 2;
    let basis = if y.ncols() == 0 {
        y.clone()
    } else {
        if linalg::numerical_rank(y, 1e-10) < y.ncols() {
            return Err(FormError::InvalidParameter(
                "columns of Y are linearly dependent".into(),
            ));
        }
        linalg::gram_orthonormalize(y, &CMatrix::identity(y.nrows(), y.nrows()))?
    };
    let r = basis.ncols();
    let interior_dim = (n - 1) * comps;
    let full_dim = (n + 1) * comps;
    // Node-major layout: index(node, c) = node * comps + c.
    let mut embed = CMatrix::zeros(full_dim, interior_dim + r);
    for node in 1..n {
        for c in 0..comps {
            embed[(node * comps + c, (node - 1) * comps + c)] = linalg::re(1.0);
        }
    }
    for col in 0..r {
        for c in 0..comps {
            embed[(c, interior_dim + col)] = basis[(c, col)];
            embed[(n * comps + c, interior_dim + col)] = basis[(comps + c, col)];
        }
    }
    let kron = |a: &CMatrix| a.kronecker(&CMatrix::identity(comps, comps));
    let energy = &stiffness(n, &coef.alpha) + weighted_mass(n, &coef.gamma);
    let h1 = &stiffness(n, &vec![1.0; n]) + &mass(n);
    let s = embed.adjoint() * kron(&energy) * &embed;
    let gv = linalg::hermitian_part(&(embed.adjoint() * kron(&h1) * &embed));
    let h = InnerProductSpace::new(kron(&interior(&mass(n))))?;
    let mut j = CMatrix::zeros(interior_dim, interior_dim + r);
    j.view_mut((0, 0), (interior_dim, interior_dim))
        .copy_from(&CMatrix::identity(interior_dim, interior_dim));
    FormPair::new(form(InnerProductSpace::new(gv)?, s)?, j, h)
}

/// The three pairs sharing the form `∫ u' v̄' + β (|u(0)|² + |u(1)|²)` on `H¹`:
/// `j₁ = u` into `L²`, `j₂ = (u, u|∂)` into `L² × ℂ²` and `j₃ = u|∂` into `ℂ²`.
///
/// The range of `j₂` is closed but not all of `L² × ℂ²`; `H₂` is that range,
/// carried on nodal coordinates with the induced Gram `M + E_∂`.
pub fn comparison_triple(n: usize, beta: f64) -> Result<[FormPair; 3]> {
    if n < 2 {
        return Err(FormError::InvalidParameter(format!("mesh needs n >= 2 cells, got {n}")));
    }
    let k = stiffness(n, &vec![1.0; n]);
    let m = mass(n);
    let e = boundary_mass(n);
    let v = InnerProductSpace::new(&k + &m)?;
    let a = form(v, &k + &e * linalg::re(beta))?;
    let id = CMatrix::identity(n + 1, n + 1);
    Ok([
        FormPair::new(a.clone(), id.clone(), InnerProductSpace::new(m.clone())?)?,
        FormPair::new(a.clone(), id, InnerProductSpace::new(&m + &e)?)?,
        FormPair::new(a, trace_map(n), InnerProductSpace::euclidean(2))?,
    ])
}

/// `Y_θ = exp(iθH) Y` for a fixed Hermitian `H` on `ℂ^{2k}`.
pub fn rotated_subspace(y: &CMatrix, generator: &CMatrix, theta: f64) -> Result<CMatrix> {
    if generator.shape() != (y.nrows(), y.nrows()) || !linalg::is_hermitian(generator, 1e-12) {
        return Err(FormError::InvalidParameter(
            "generator must be Hermitian on C^(2k)".into(),
        ));
    }
    let unitary = linalg::expm(&(generator * Complex64::new(0.0, theta)));
    Ok(unitary * y)
}
