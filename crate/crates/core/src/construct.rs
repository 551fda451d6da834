//! Symplectic continuous-stage RK coefficients over a Jacobi basis.
//!
//! The weight function is `B_τ = (Σ_{j<ξ} λ_j J_j(τ)) w(τ)` with
//! `λ_j = ∫_0^1 J_j`, and the kernel is
//!
//! ```text
//! A_{τ,σ} = B_σ (1/2 + Σ_{i ≤ ρ, j ≤ ξ-η} α_(i,j) J_i(τ) J_j(σ)),   α skew-symmetric.
//! ```
//!
//! Any such pair satisfies `B_τ A_{τ,σ} + B_σ A_{σ,τ} = B_τ B_σ`. The
//! skew-symmetric coefficients are then fixed by requiring
//! `∫_0^1 A_{τ,σ} φ_k(σ) dσ = ∫_0^τ φ_k` for test polynomials of degree
//! `k < η`, which is linear in the unknowns once both sides are expanded in
//! `J_i(τ)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polybasis::{BasisPoly, JacobiBasis};
use crate::quadrature;
use crate::tableau::Simplifying;

/// Singular values below `RANK_TOL * σ_max` count as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Least-squares residual above which the system is reported inconsistent.
pub const INCONSISTENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    #[serde(flatten)]
    pub basis: JacobiBasis,
    /// `B̆(ξ)` order.
    pub xi: usize,
    /// `C̆(η)` order.
    pub eta: usize,
    /// Cutoff of the τ-expansion.
    pub rho: usize,
}

impl ConstructionParams {
    pub fn new(basis: JacobiBasis, xi: usize, eta: usize, rho: usize) -> Result<Self> {
        let params = Self { basis, xi, eta, rho };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.xi == 0 {
            return Err(Error::Argument("xi must be at least 1".into()));
        }
        if self.rho < self.eta {
            return Err(Error::Argument(format!("rho ({}) must be >= eta ({})", self.rho, self.eta)));
        }
        if self.xi < 2 * self.eta {
            return Err(Error::Argument(format!("xi ({}) must be >= 2 * eta ({})", self.xi, 2 * self.eta)));
        }
        Ok(())
    }

    /// Largest index that can carry a nonzero coefficient, `min(ρ, ξ - η)`.
    pub fn r(&self) -> usize {
        self.rho.min(self.xi - self.eta)
    }

    /// Highest σ-index of the kernel expansion, `ξ - η`.
    pub fn sigma_cutoff(&self) -> usize {
        self.xi - self.eta
    }

    /// Strict upper triangle of the `(r+1) × (r+1)` block, column by column:
    /// `(0,1), (0,2), (1,2), (0,3), ...`. There are `r(r+1)/2` of them.
    pub fn unknowns(&self) -> Vec<(usize, usize)> {
        let r = self.r();
        (1..=r).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
    }
}

/// A continuous-stage method: `λ_0..λ_{ξ-1}` and the `(ρ+1) × (ξ-η+1)` block of α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsRKCoefficients {
    #[serde(flatten)]
    pub params: ConstructionParams,
    pub lambda: Vec<f64>,
    pub alpha_mat: Vec<Vec<f64>>,
}

impl CsRKCoefficients {
    /// Fill the α block from values on [`ConstructionParams::unknowns`].
    pub fn from_unknowns(params: ConstructionParams, lambda: Vec<f64>, values: &[f64]) -> Self {
        let mut alpha_mat = vec![vec![0.0; params.sigma_cutoff() + 1]; params.rho + 1];
        for (&(i, j), &v) in params.unknowns().iter().zip(values) {
            alpha_mat[i][j] = v;
            alpha_mat[j][i] = -v;
        }
        Self { params, lambda, alpha_mat }
    }

    /// Shape and skew-symmetry checks for coefficients read from a file.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let p = &self.params;
        if self.lambda.len() != p.xi {
            return Err(Error::Argument(format!("expected {} lambda values, got {}", p.xi, self.lambda.len())));
        }
        if self.alpha_mat.len() != p.rho + 1 || self.alpha_mat.iter().any(|row| row.len() != p.sigma_cutoff() + 1) {
            return Err(Error::Argument(format!("alpha_mat must be {} x {}", p.rho + 1, p.sigma_cutoff() + 1)));
        }
        for i in 0..=p.rho {
            for j in 0..=p.sigma_cutoff() {
                let partner = if j <= p.rho && i <= p.sigma_cutoff() { -self.alpha_mat[j][i] } else { 0.0 };
                if (self.alpha_mat[i][j] - partner).abs() > 1e-12 {
                    return Err(Error::Argument(format!("alpha_mat is not skew-symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> JacobiBasis {
        self.params.basis
    }

    /// `α_(i,j)`, zero outside the stored block.
    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        self.alpha_mat.get(i).and_then(|row| row.get(j)).copied().unwrap_or(0.0)
    }

    /// `B̂_τ = Σ λ_j J_j(τ)`.
    pub fn eval_b_hat(&self, tau: f64) -> f64 {
        let values = self.basis().eval_upto(self.params.xi - 1, tau);
        self.lambda.iter().zip(values).map(|(l, v)| l * v).sum()
    }

    /// `1/2 + Σ α_(i,j) J_i(τ) J_j(σ)`.
    fn kernel(&self, tau: f64, sigma: f64) -> f64 {
        let basis = self.basis();
        let jt = basis.eval_upto(self.params.rho, tau);
        let js = basis.eval_upto(self.params.sigma_cutoff(), sigma);
        let mut sum = 0.5;
        for (row, ti) in self.alpha_mat.iter().zip(&jt) {
            for (a, sj) in row.iter().zip(&js) {
                sum += a * ti * sj;
            }
        }
        sum
    }

    /// `Â_{τ,σ} = B̂_σ (1/2 + Σ α_(i,j) J_i(τ) J_j(σ))`.
    pub fn eval_a_hat(&self, tau: f64, sigma: f64) -> f64 {
        self.eval_b_hat(sigma) * self.kernel(tau, sigma)
    }

    fn weight_at(&self, x: f64) -> Result<f64> {
        let basis = self.basis();
        if (x <= 0.0 && basis.beta < 0.0) || (x >= 1.0 && basis.alpha < 0.0) {
            return Err(Error::Domain(format!("weight is singular at x = {x}")));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
        }
        Ok(basis.weight(x))
    }

    /// `B_τ = B̂_τ w(τ)`.
    pub fn eval_b(&self, tau: f64) -> Result<f64> {
        Ok(self.eval_b_hat(tau) * self.weight_at(tau)?)
    }

    /// `A_{τ,σ} = Â_{τ,σ} w(σ)`.
    pub fn eval_a(&self, tau: f64, sigma: f64) -> Result<f64> {
        Ok(self.eval_a_hat(tau, sigma) * self.weight_at(sigma)?)
    }

    /// Degree of `B̂` read off the truncation, `ξ - 1`.
    pub fn degree_b(&self) -> usize {
        self.params.xi - 1
    }

    /// Degree of `Â` in τ read off the truncation, `ρ`.
    pub fn degree_a_tau(&self) -> usize {
        self.params.rho
    }

    /// Degree of `Â` in σ read off the truncation, `(ξ - η) + (ξ - 1)`.
    pub fn degree_a_sigma(&self) -> usize {
        self.params.sigma_cutoff() + self.params.xi - 1
    }
}

/// `λ_j = ∫_0^1 J_j(x) dx` for `j < ξ`.
pub fn build_b(params: &ConstructionParams) -> Vec<f64> {
    (0..params.xi).map(|j| params.basis.integral(j)).collect()
}

/// Test functions used to impose `C̆(η)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFamily {
    /// `φ_k = J_k^{(α+1,β+1)}`, integrated in closed form.
    Jacobi,
    /// `φ_k = x^k`.
    Monomial,
}

/// Linear conditions on the skew-symmetric unknowns.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub unknowns: Vec<(usize, usize)>,
}

pub fn assemble_system(params: &ConstructionParams) -> Result<LinearSystem> {
    assemble_system_with(params, TestFamily::Jacobi)
}

/// Expand `∫_0^1 A_{τ,σ} φ_k dσ - ∫_0^τ φ_k` in `J_i(τ)`, `i ≤ ρ`, one row
/// per `(k, i)`.
pub fn assemble_system_with(params: &ConstructionParams, family: TestFamily) -> Result<LinearSystem> {
    params.validate()?;
    let basis = params.basis;
    let unknowns = params.unknowns();
    let n_rows = (params.rho + 1) * params.eta;
    let mut matrix = DMatrix::zeros(n_rows, unknowns.len());
    let mut rhs = DVector::zeros(n_rows);
    let r = params.r();

    for k in 0..params.eta {
        // ∫_0^τ φ_k - (1/2) ∫_0^1 φ_k, in the (α, β) basis
        let (target, mixed, row_scale): (BasisPoly, Vec<f64>, f64) = match family {
            TestFamily::Jacobi => {
                let anti = basis.antiderivative_shifted(k);
                let half_total = 0.5 * anti.eval(1.0);
                let target = anti.sub(&basis.constant(half_total))?;
                let mixed = (0..=r).map(|j| basis.mixed_inner_product(j, k)).collect();
                // clears μ_k from both sides
                (target, mixed, basis.mu(k))
            }
            TestFamily::Monomial => {
                let kf = (k + 1) as f64;
                let rule = quadrature::gauss_jacobi(basis, params.rho + k + 2)?;
                let coeffs = (0..=params.rho)
                    .map(|i| rule.integrate(|x| x.powi(k as i32 + 1) / kf * basis.eval(i, x)))
                    .collect();
                let target = BasisPoly::new(basis, coeffs).sub(&basis.constant(0.5 / kf))?;
                let (nodes, weights) = quadrature::gauss_legendre((r + k) / 2 + 1);
                let mixed = (0..=r)
                    .map(|j| nodes.iter().zip(&weights).map(|(&x, &w)| w * basis.eval(j, x) * x.powi(k as i32)).sum())
                    .collect();
                (target, mixed, 1.0)
            }
        };
        if target.degree().is_some_and(|d| d > params.rho) {
            return Err(Error::Argument(format!("test function {k} needs tau-degree above rho = {}", params.rho)));
        }
        let row0 = k * (params.rho + 1);
        for i in 0..=params.rho {
            rhs[row0 + i] = row_scale * target.coeff(i);
        }
        for (col, &(a, b)) in unknowns.iter().enumerate() {
            // α_(a,b) J_a(τ) m_b + α_(b,a) J_b(τ) m_a with α_(b,a) = -α_(a,b)
            matrix[(row0 + a, col)] += row_scale * mixed[b];
            matrix[(row0 + b, col)] -= row_scale * mixed[a];
        }
    }
    Ok(LinearSystem { matrix, rhs, unknowns })
}

/// Solution set of the skew-symmetric unknowns.
///
/// Unknowns are scanned in the order of [`ConstructionParams::unknowns`];
/// each one that is linearly independent of the earlier ones is a pivot and
/// the rest are free. `particular` has every free unknown at zero and
/// `null_basis[k]` is the direction in which free unknown `k` grows with unit
/// slope, so `with_free(&[μ])` reproduces one-parameter families like
/// `α_(0,1) = μ/3 - π/8, α_(0,2) = α_(1,2) = μ`.
#[derive(Debug, Clone)]
pub struct AlphaSolution {
    pub particular: CsRKCoefficients,
    pub unknowns: Vec<(usize, usize)>,
    pub particular_values: Vec<f64>,
    /// Homogeneous directions, in unknown coordinates.
    pub null_basis: Vec<Vec<f64>>,
    pub free_unknowns: Vec<(usize, usize)>,
    pub free_dim: usize,
    pub rank: usize,
    /// Max-norm residual of the particular solution.
    pub residual: f64,
}

impl AlphaSolution {
    pub fn params(&self) -> &ConstructionParams {
        &self.particular.params
    }

    /// Values of all unknowns for the given free parameters.
    pub fn values_with_free(&self, free: &[f64]) -> Result<Vec<f64>> {
        if free.len() > self.free_dim {
            return Err(Error::Argument(format!(
                "{} free values given but the solution has {} free parameters",
                free.len(),
                self.free_dim
            )));
        }
        let mut values = self.particular_values.clone();
        for (dir, &t) in self.null_basis.iter().zip(free) {
            for (v, d) in values.iter_mut().zip(dir) {
                *v += t * d;
            }
        }
        Ok(values)
    }

    /// Family member with the first `free.len()` free parameters set; the
    /// remaining ones stay at zero.
    pub fn with_free(&self, free: &[f64]) -> Result<CsRKCoefficients> {
        let values = self.values_with_free(free)?;
        Ok(CsRKCoefficients::from_unknowns(*self.params(), self.particular.lambda.clone(), &values))
    }

    /// Null directions as full α blocks.
    pub fn null_matrices(&self) -> Vec<Vec<Vec<f64>>> {
        let p = *self.params();
        self.null_basis.iter().map(|dir| CsRKCoefficients::from_unknowns(p, Vec::new(), dir).alpha_mat).collect()
    }

    /// Member of the family with the smallest Euclidean norm of the unknowns.
    pub fn min_norm(&self) -> CsRKCoefficients {
        let values = if self.null_basis.is_empty() {
            self.particular_values.clone()
        } else {
            let n = DMatrix::from_fn(self.unknowns.len(), self.free_dim, |i, k| self.null_basis[k][i]);
            let x = DVector::from_column_slice(&self.particular_values);
            let gram = n.transpose() * &n;
            let coords = gram.lu().solve(&(n.transpose() * &x)).unwrap_or_else(|| DVector::zeros(self.free_dim));
            (x - n * coords).iter().copied().collect()
        };
        CsRKCoefficients::from_unknowns(*self.params(), self.particular.lambda.clone(), &values)
    }
}

fn numerical_rank(m: &DMatrix<f64>, threshold: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    m.clone().svd(false, false).singular_values.iter().filter(|&&s| s > threshold).count()
}

fn least_squares(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if m.ncols() == 0 {
        return Ok(DVector::zeros(0));
    }
    // Callers pass full-column-rank matrices, so Householder QR suffices and
    // is markedly more accurate here than the iterative SVD.
    let qr = m.clone().qr();
    let qtb = qr.q().transpose() * rhs;
    qr.r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Argument("least-squares solve hit a singular triangle".into()))
}

pub fn solve_alpha(params: &ConstructionParams) -> Result<AlphaSolution> {
    solve_alpha_with(params, TestFamily::Jacobi)
}

pub fn solve_alpha_with(params: &ConstructionParams, family: TestFamily) -> Result<AlphaSolution> {
    let system = assemble_system_with(params, family)?;
    let LinearSystem { matrix, rhs, unknowns } = system;
    let n = unknowns.len();

    let sigma_max =
        if n == 0 || matrix.nrows() == 0 { 0.0 } else { matrix.clone().svd(false, false).singular_values.max() };
    let threshold = RANK_TOL * sigma_max;

    let mut pivots: Vec<usize> = Vec::new();
    let mut free: Vec<usize> = Vec::new();
    for col in 0..n {
        let mut cols = pivots.clone();
        cols.push(col);
        if sigma_max > 0.0 && numerical_rank(&matrix.select_columns(&cols), threshold) == cols.len() {
            pivots.push(col);
        } else {
            free.push(col);
        }
    }

    let pivot_matrix = matrix.select_columns(&pivots);
    let pivot_values = least_squares(&pivot_matrix, &rhs)?;
    let mut values = vec![0.0; n];
    for (&col, &v) in pivots.iter().zip(pivot_values.iter()) {
        values[col] = v;
    }
    let x = DVector::from_column_slice(&values);
    let residual = if rhs.is_empty() { 0.0 } else { (&matrix * &x - &rhs).amax() };
    if residual > INCONSISTENT_TOL {
        return Err(Error::Inconsistent { residual });
    }

    let mut null_basis = Vec::with_capacity(free.len());
    for &f in &free {
        let column = -matrix.column(f).clone_owned();
        let coords = least_squares(&pivot_matrix, &column)?;
        let mut dir = vec![0.0; n];
        dir[f] = 1.0;
        for (&col, &v) in pivots.iter().zip(coords.iter()) {
            dir[col] = v;
        }
        null_basis.push(dir);
    }

    let lambda = build_b(params);
    let particular = CsRKCoefficients::from_unknowns(*params, lambda, &values);
    Ok(AlphaSolution {
        particular,
        free_unknowns: free.iter().map(|&f| unknowns[f]).collect(),
        free_dim: free.len(),
        rank: pivots.len(),
        unknowns,
        particular_values: values,
        null_basis,
        residual,
    })
}

/// Order guaranteed by `B̆(ξ)`, `C̆(η)` and the implied `D̆(min(ξ, η))`.
pub fn order_bound(xi: usize, eta: usize) -> usize {
    let zeta = xi.min(eta);
    xi.min(2 * eta + 2).min(eta + zeta + 1)
}

/// `max |B_τ A_{τ,σ} + B_σ A_{σ,τ} - B_τ B_σ|` over `samples × samples`
/// interior points `(i + 1/2) / samples`.
pub fn continuous_symplectic_residual(coeffs: &CsRKCoefficients, samples: usize) -> Result<f64> {
    let grid: Vec<f64> = (0..samples).map(|i| (i as f64 + 0.5) / samples as f64).collect();
    let b: Vec<f64> = grid.iter().map(|&t| coeffs.eval_b(t)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, &tau) in grid.iter().enumerate() {
        for (j, &sigma) in grid.iter().enumerate() {
            let lhs = b[i] * coeffs.eval_a(tau, sigma)? + b[j] * coeffs.eval_a(sigma, tau)?;
            worst = worst.max((lhs - b[i] * b[j]).abs());
        }
    }
    Ok(worst)
}

/// Residual of a continuous simplifying assumption with monomial test
/// functions. Integrals use a Gauss-Jacobi rule exact for the polynomial
/// factor; `points` are the τ (for C̆) or σ (for D̆) sample locations.
pub fn continuous_simplifying_residual(
    coeffs: &CsRKCoefficients,
    which: Simplifying,
    order: usize,
    points: &[f64],
) -> Result<f64> {
    let p = &coeffs.params;
    let s = (coeffs.degree_a_sigma() + coeffs.degree_a_tau() + coeffs.degree_b() + order) / 2 + 2;
    let rule = quadrature::gauss_jacobi(p.basis, s)?;
    let mut worst: f64 = 0.0;
    for kappa in 1..=order {
        let kf = kappa as f64;
        let e = kappa as i32 - 1;
        match which {
            Simplifying::B => {
                let lhs = rule.integrate(|t| coeffs.eval_b_hat(t) * t.powi(e));
                worst = worst.max((lhs - 1.0 / kf).abs());
            }
            Simplifying::C => {
                for &tau in points {
                    let lhs = rule.integrate(|sg| coeffs.eval_a_hat(tau, sg) * sg.powi(e));
                    worst = worst.max((lhs - tau.powi(kappa as i32) / kf).abs());
                }
            }
            Simplifying::D => {
                // divided through by w(σ)
                for &sigma in points {
                    let lhs = rule.integrate(|t| coeffs.eval_b_hat(t) * coeffs.eval_a_hat(t, sigma) * t.powi(e));
                    let rhs = coeffs.eval_b_hat(sigma) * (1.0 - sigma.powi(kappa as i32)) / kf;
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
    }
    Ok(worst)
}
