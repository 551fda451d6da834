//! Gauss-Christoffel rules on `[0, 1]` for the Jacobi weight.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polybasis::JacobiBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    /// Nodes from the tridiagonal eigenvalue problem.
    GaussJacobi,
    /// Closed-form rule for Chebyshev polynomials of the third kind.
    Chebyshev3,
    /// Closed-form rule for Chebyshev polynomials of the fourth kind.
    Chebyshev4,
}

impl RuleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleKind::GaussJacobi => "gauss-jacobi",
            RuleKind::Chebyshev3 => "chebyshev3",
            RuleKind::Chebyshev4 => "chebyshev4",
        }
    }
}

/// `∫_0^1 Φ(x) w(x) dx ≈ Σ b_i Φ(c_i)` with nodes ascending in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RuleRecord", try_from = "RuleRecord")]
pub struct QuadratureRule {
    pub basis: JacobiBasis,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly against the weight.
    pub exactness_degree: usize,
    pub kind: RuleKind,
}

#[derive(Serialize, Deserialize)]
struct RuleRecord {
    alpha: f64,
    beta: f64,
    s: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    exactness: usize,
    #[serde(default = "default_kind")]
    kind: RuleKind,
}

fn default_kind() -> RuleKind {
    RuleKind::GaussJacobi
}

impl From<QuadratureRule> for RuleRecord {
    fn from(rule: QuadratureRule) -> Self {
        RuleRecord {
            alpha: rule.basis.alpha,
            beta: rule.basis.beta,
            s: rule.nodes.len(),
            c: rule.nodes,
            b: rule.weights,
            exactness: rule.exactness_degree,
            kind: rule.kind,
        }
    }
}

impl TryFrom<RuleRecord> for QuadratureRule {
    type Error = Error;

    fn try_from(rec: RuleRecord) -> Result<Self> {
        if rec.c.len() != rec.s || rec.b.len() != rec.s {
            return Err(Error::Argument(format!(
                "rule declares s={} but has {} nodes and {} weights",
                rec.s,
                rec.c.len(),
                rec.b.len()
            )));
        }
        let rule = QuadratureRule {
            basis: JacobiBasis::new(rec.alpha, rec.beta)?,
            nodes: rec.c,
            weights: rec.b,
            exactness_degree: rec.exactness,
            kind: rec.kind,
        };
        rule.validate()?;
        Ok(rule)
    }
}

impl QuadratureRule {
    pub fn stages(&self) -> usize {
        self.nodes.len()
    }

    /// Quadrature order `p`, one more than the exactness degree.
    pub fn order(&self) -> usize {
        self.exactness_degree + 1
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&c, &b)| b * f(c)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Quadrature("rule has no nodes".into()));
        }
        if self.nodes.iter().any(|&c| !(c > 0.0 && c < 1.0)) {
            return Err(Error::Quadrature("nodes must lie strictly inside (0, 1)".into()));
        }
        if self.nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Quadrature("nodes must be strictly increasing".into()));
        }
        if self.weights.iter().any(|&b| !b.is_finite() || b <= 0.0) {
            return Err(Error::Quadrature("weights must be positive".into()));
        }
        Ok(())
    }
}

/// Classical Jacobi recurrence (monic, on `[-1, 1]`) as a symmetric
/// tridiagonal matrix; eigenvalues mapped to `[0, 1]`, ascending.
fn golub_welsch(basis: &JacobiBasis, s: usize) -> Vec<f64> {
    let (a, b) = (basis.alpha, basis.beta);
    let mut jac = DMatrix::<f64>::zeros(s, s);
    for n in 0..s {
        let diag = if n == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            let t = 2.0 * n as f64 + a + b;
            (b * b - a * a) / (t * (t + 2.0))
        };
        jac[(n, n)] = diag;
        if n >= 1 {
            let nf = n as f64;
            let t = 2.0 * nf + a + b;
            let off2 = if n == 1 {
                // (n + a + b) / (2n + a + b - 1) cancels at n = 1
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * nf * (nf + a) * (nf + b) * (nf + a + b) / (t * t * (t + 1.0) * (t - 1.0))
            };
            jac[(n, n - 1)] = off2.sqrt();
            jac[(n - 1, n)] = off2.sqrt();
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().map(|t| 0.5 * (t + 1.0)).collect();
    nodes.sort_by(|x, y| x.total_cmp(y));
    nodes
}

fn polish(basis: &JacobiBasis, s: usize, x: f64) -> f64 {
    let mut x = x;
    for _ in 0..3 {
        let dp = basis.eval_derivative(s, 1, x);
        if dp == 0.0 {
            break;
        }
        let step = basis.eval(s, x) / dp;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// Christoffel numbers `1 / Σ_{k<s} J_k(c)^2` of the orthonormal family.
fn christoffel(basis: &JacobiBasis, s: usize, c: f64) -> f64 {
    let values = basis.eval_upto(s - 1, c);
    1.0 / values.iter().map(|v| v * v).sum::<f64>()
}

fn gauss_nodes_weights(basis: &JacobiBasis, s: usize) -> (Vec<f64>, Vec<f64>) {
    let nodes: Vec<f64> = golub_welsch(basis, s).into_iter().map(|x| polish(basis, s, x)).collect();
    let weights = nodes.iter().map(|&c| christoffel(basis, s, c)).collect();
    (nodes, weights)
}

/// `s`-point Gauss-Jacobi rule: nodes are the zeros of `J_s^{(α,β)}`, exact to degree `2s - 1`.
pub fn gauss_jacobi(basis: JacobiBasis, s: usize) -> Result<QuadratureRule> {
    if s == 0 {
        return Err(Error::Argument("a quadrature rule needs at least one node".into()));
    }
    let (nodes, weights) = gauss_nodes_weights(&basis, s);
    if nodes.iter().chain(&weights).any(|v| !v.is_finite()) {
        return Err(Error::Quadrature(format!(
            "non-finite node or weight for s={s}, alpha={}, beta={}",
            basis.alpha, basis.beta
        )));
    }
    let rule = QuadratureRule { basis, nodes, weights, exactness_degree: 2 * s - 1, kind: RuleKind::GaussJacobi };
    rule.validate()?;
    Ok(rule)
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    gauss_nodes_weights(&JacobiBasis::legendre(), n)
}

fn chebyshev_angles(s: usize) -> impl Iterator<Item = f64> {
    let denom = (2 * s + 1) as f64;
    (1..=s).map(move |i| (2 * i - 1) as f64 / denom * PI / 2.0)
}

/// Closed-form rule for weight `sqrt(x / (1 - x))`:
/// `c_i = cos^2((2i-1)/(2s+1) π/2)`, `b_i = 2π/(2s+1) c_i`.
pub fn chebyshev3_rule(s: usize) -> Result<QuadratureRule> {
    if s == 0 {
        return Err(Error::Argument("a quadrature rule needs at least one node".into()));
    }
    let scale = 2.0 * PI / (2 * s + 1) as f64;
    let mut pairs: Vec<(f64, f64)> = chebyshev_angles(s)
        .map(|theta| {
            let c = theta.cos().powi(2);
            (c, scale * c)
        })
        .collect();
    pairs.reverse();
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        basis: JacobiBasis::chebyshev3(),
        nodes,
        weights,
        exactness_degree: 2 * s - 1,
        kind: RuleKind::Chebyshev3,
    })
}

/// Closed-form rule for weight `sqrt((1 - x) / x)`, the mirror image of
/// [`chebyshev3_rule`] under `x ↦ 1 - x`.
pub fn chebyshev4_rule(s: usize) -> Result<QuadratureRule> {
    if s == 0 {
        return Err(Error::Argument("a quadrature rule needs at least one node".into()));
    }
    let scale = 2.0 * PI / (2 * s + 1) as f64;
    let (nodes, weights) = chebyshev_angles(s)
        .map(|theta| {
            let one_minus_c = theta.cos().powi(2);
            (theta.sin().powi(2), scale * one_minus_c)
        })
        .unzip();
    Ok(QuadratureRule {
        basis: JacobiBasis::chebyshev4(),
        nodes,
        weights,
        exactness_degree: 2 * s - 1,
        kind: RuleKind::Chebyshev4,
    })
}

/// Preferred `s`-point rule for a basis: the closed form for Chebyshev III/IV,
/// the eigenvalue construction otherwise.
pub fn default_rule(basis: JacobiBasis, s: usize) -> Result<QuadratureRule> {
    if basis.approx_eq(&JacobiBasis::chebyshev3()) {
        chebyshev3_rule(s)
    } else if basis.approx_eq(&JacobiBasis::chebyshev4()) {
        chebyshev4_rule(s)
    } else {
        gauss_jacobi(basis, s)
    }
}
