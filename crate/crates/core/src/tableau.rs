//! Finite Butcher tableaux obtained by applying a quadrature rule to a
//! continuous-stage method, and the algebraic checks run on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::construct::{order_bound, CsRKCoefficients};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// Tolerance for the rooted-tree order conditions.
pub const ORDER_TOL: f64 = 1e-9;

/// Simplifying assumptions `B̆`, `C̆`, `D̆` (and their discrete forms).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Simplifying {
    B,
    C,
    D,
}

impl fmt::Display for Simplifying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Simplifying::B => "B",
            Simplifying::C => "C",
            Simplifying::D => "D",
        };
        f.write_str(name)
    }
}

/// Where a tableau came from. Every field is optional so hand-written
/// tableaux can leave it empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_order: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub free_parameters: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTableau")]
pub struct ButcherTableau {
    pub s: usize,
    pub c: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub declared_order: usize,
    #[serde(default)]
    pub provenance: Provenance,
}

#[derive(Deserialize)]
struct RawTableau {
    s: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(default)]
    declared_order: usize,
    #[serde(default)]
    provenance: Provenance,
}

impl TryFrom<RawTableau> for ButcherTableau {
    type Error = Error;

    fn try_from(raw: RawTableau) -> Result<Self> {
        let mut t = ButcherTableau::new(raw.c, raw.b, raw.a, raw.declared_order)?;
        if t.s != raw.s {
            return Err(Error::Argument(format!("tableau declares s={} but has {} stages", raw.s, t.s)));
        }
        t.provenance = raw.provenance;
        Ok(t)
    }
}

impl ButcherTableau {
    pub fn new(c: Vec<f64>, b: Vec<f64>, a: Vec<Vec<f64>>, declared_order: usize) -> Result<Self> {
        let s = c.len();
        if s == 0 {
            return Err(Error::Argument("tableau has no stages".into()));
        }
        if b.len() != s || a.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::Argument(format!(
                "tableau with {s} abscissae must have {s} weights and an {s}x{s} matrix"
            )));
        }
        if c.iter().chain(&b).chain(a.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Argument("tableau has non-finite entries".into()));
        }
        Ok(Self { s, c, b, a, declared_order, provenance: Provenance::default() })
    }

    pub fn explicit_euler() -> Self {
        let mut t = Self::new(vec![0.0], vec![1.0], vec![vec![0.0]], 1).expect("valid");
        t.provenance.source = Some("explicit Euler".into());
        t
    }

    pub fn implicit_midpoint() -> Self {
        let mut t = Self::new(vec![0.5], vec![1.0], vec![vec![0.5]], 2).expect("valid");
        t.provenance.source = Some("implicit midpoint".into());
        t
    }

    /// Row sums `Σ_j a_ij`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.a.iter().map(|row| row.iter().sum()).collect()
    }

    /// Reorder stages: stage `k` of the result is stage `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut t = self.clone();
        t.c = perm.iter().map(|&i| self.c[i]).collect();
        t.b = perm.iter().map(|&i| self.b[i]).collect();
        t.a = perm.iter().map(|&i| perm.iter().map(|&j| self.a[i][j]).collect()).collect();
        t
    }

    fn sorted_by_c(&self, descending: bool) -> Self {
        let mut perm: Vec<usize> = (0..self.s).collect();
        perm.sort_by(|&i, &j| self.c[i].total_cmp(&self.c[j]));
        if descending {
            perm.reverse();
        }
        self.permuted(&perm)
    }

    pub fn ascending(&self) -> Self {
        self.sorted_by_c(false)
    }

    pub fn descending(&self) -> Self {
        self.sorted_by_c(true)
    }

    /// Largest entry-wise difference after putting both tableaux in
    /// ascending node order.
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        if self.s != other.s {
            return Err(Error::Argument(format!("stage counts differ ({} vs {})", self.s, other.s)));
        }
        let (x, y) = (self.ascending(), other.ascending());
        let mut worst: f64 = 0.0;
        for i in 0..x.s {
            worst = worst.max((x.c[i] - y.c[i]).abs()).max((x.b[i] - y.b[i]).abs());
            for j in 0..x.s {
                worst = worst.max((x.a[i][j] - y.a[i][j]).abs());
            }
        }
        Ok(worst)
    }
}

impl fmt::Display for ButcherTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |v: f64| format!("{v:>18.14}");
        for i in 0..self.s {
            write!(f, "{} |", cell(self.c[i]))?;
            for j in 0..self.s {
                write!(f, " {}", cell(self.a[i][j]))?;
            }
            writeln!(f)?;
        }
        writeln!(f, "{}-+{}", "-".repeat(18), "-".repeat(19 * self.s))?;
        write!(f, "{} |", " ".repeat(18))?;
        for bi in &self.b {
            write!(f, " {}", cell(*bi))?;
        }
        writeln!(f)
    }
}

/// Lower bound on the order of the discretized method given the quadrature
/// order `p` and the truncation degrees of `B̂` and `Â`.
pub fn quadrature_order_bound(coeffs: &CsRKCoefficients, p: usize) -> usize {
    let prm = &coeffs.params;
    let p = p as i64;
    let (xi, eta) = (prm.xi as i64, prm.eta as i64);
    let zeta = xi.min(eta);
    let pi_b = coeffs.degree_b() as i64;
    let pi_a_tau = coeffs.degree_a_tau() as i64;
    let pi_a_sigma = coeffs.degree_a_sigma() as i64;
    let rho_star = xi.min(p - pi_b);
    let alpha_star = eta.min(p - pi_a_sigma);
    let beta_star = zeta.min(p - pi_a_tau - pi_b);
    rho_star.min(2 * alpha_star + 2).min(alpha_star + beta_star + 1).max(0) as usize
}

/// `a_ij = b_j Â(c_i, c_j)`, `b̂_i = b_i B̂(c_i)`.
pub fn discretize(coeffs: &CsRKCoefficients, rule: &QuadratureRule) -> Result<ButcherTableau> {
    if !coeffs.basis().approx_eq(&rule.basis) {
        return Err(Error::Argument(format!(
            "basis mismatch: coefficients use ({}, {}), rule uses ({}, {})",
            coeffs.basis().alpha,
            coeffs.basis().beta,
            rule.basis.alpha,
            rule.basis.beta
        )));
    }
    rule.validate()?;
    let c = rule.nodes.clone();
    let b: Vec<f64> = c.iter().zip(&rule.weights).map(|(&ci, &bi)| bi * coeffs.eval_b_hat(ci)).collect();
    let a: Vec<Vec<f64>> = c
        .iter()
        .map(|&ci| c.iter().zip(&rule.weights).map(|(&cj, &bj)| bj * coeffs.eval_a_hat(ci, cj)).collect())
        .collect();

    let declared = quadrature_order_bound(coeffs, rule.order());
    let continuous = order_bound(coeffs.params.xi, coeffs.params.eta);
    let mut t = ButcherTableau::new(c, b, a, declared)?;
    let prm = &coeffs.params;
    t.provenance = Provenance {
        alpha: Some(prm.basis.alpha),
        beta: Some(prm.basis.beta),
        xi: Some(prm.xi),
        eta: Some(prm.eta),
        rho: Some(prm.rho),
        quadrature: Some(format!("{}/{}", rule.kind.as_str(), rule.stages())),
        quadrature_order: Some(rule.order()),
        free_parameters: Vec::new(),
        source: Some("csrk-discretization".into()),
        warnings: Vec::new(),
    };
    if declared < continuous {
        t.provenance.warnings.push(format!(
            "quadrature of order {} only guarantees order {declared} (continuous method has order {continuous})",
            rule.order()
        ));
    }
    Ok(t)
}

/// `max_{i,j} |b_i a_ij + b_j a_ji - b_i b_j|`.
pub fn check_symplectic(t: &ButcherTableau) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..t.s {
        for j in 0..t.s {
            let r = t.b[i] * t.a[i][j] + t.b[j] * t.a[j][i] - t.b[i] * t.b[j];
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// Residual of the discrete simplifying assumption `which` up to `order`.
pub fn check_simplifying(t: &ButcherTableau, which: Simplifying, order: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for kappa in 1..=order {
        let k = kappa as i32;
        let kf = kappa as f64;
        match which {
            Simplifying::B => {
                let sum: f64 = t.b.iter().zip(&t.c).map(|(b, c)| b * c.powi(k - 1)).sum();
                worst = worst.max((sum - 1.0 / kf).abs());
            }
            Simplifying::C => {
                for i in 0..t.s {
                    let sum: f64 = (0..t.s).map(|j| t.a[i][j] * t.c[j].powi(k - 1)).sum();
                    worst = worst.max((sum - t.c[i].powi(k) / kf).abs());
                }
            }
            Simplifying::D => {
                for j in 0..t.s {
                    let sum: f64 = (0..t.s).map(|i| t.b[i] * t.c[i].powi(k - 1) * t.a[i][j]).sum();
                    worst = worst.max((sum - t.b[j] * (1.0 - t.c[j].powi(k)) / kf).abs());
                }
            }
        }
    }
    worst
}

/// One rooted-tree order condition `b^T Φ = 1/γ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderCondition {
    pub order: usize,
    pub label: &'static str,
    pub residual: f64,
}

fn mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn hadamard(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(x, y)| x * y).collect()
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(x, y)| x * y).sum()
}

/// The 17 rooted-tree conditions through order 5 (clamped to `max_order`),
/// with `c = A·1`.
pub fn order_conditions(t: &ButcherTableau, max_order: usize) -> Vec<OrderCondition> {
    let b = &t.b;
    let a = &t.a;
    let one = vec![1.0; t.s];
    let c = mat_vec(a, &one);
    let c2 = hadamard(&c, &c);
    let c3 = hadamard(&c2, &c);
    let c4 = hadamard(&c3, &c);
    let ac = mat_vec(a, &c);
    let ac2 = mat_vec(a, &c2);
    let ac3 = mat_vec(a, &c3);
    let aac = mat_vec(a, &ac);
    let aac2 = mat_vec(a, &ac2);
    let aaac = mat_vec(a, &aac);
    let a_c_ac = mat_vec(a, &hadamard(&c, &ac));

    let table: [(usize, &'static str, f64, f64); 17] = [
        (1, "b.1", dot(b, &one), 1.0),
        (2, "b.c", dot(b, &c), 1.0 / 2.0),
        (3, "b.c^2", dot(b, &c2), 1.0 / 3.0),
        (3, "b.Ac", dot(b, &ac), 1.0 / 6.0),
        (4, "b.c^3", dot(b, &c3), 1.0 / 4.0),
        (4, "b.(c*Ac)", dot(b, &hadamard(&c, &ac)), 1.0 / 8.0),
        (4, "b.Ac^2", dot(b, &ac2), 1.0 / 12.0),
        (4, "b.AAc", dot(b, &aac), 1.0 / 24.0),
        (5, "b.c^4", dot(b, &c4), 1.0 / 5.0),
        (5, "b.(c^2*Ac)", dot(b, &hadamard(&c2, &ac)), 1.0 / 10.0),
        (5, "b.(c*Ac^2)", dot(b, &hadamard(&c, &ac2)), 1.0 / 15.0),
        (5, "b.(c*AAc)", dot(b, &hadamard(&c, &aac)), 1.0 / 30.0),
        (5, "b.(Ac)^2", dot(b, &hadamard(&ac, &ac)), 1.0 / 20.0),
        (5, "b.Ac^3", dot(b, &ac3), 1.0 / 20.0),
        (5, "b.A(c*Ac)", dot(b, &a_c_ac), 1.0 / 40.0),
        (5, "b.AAc^2", dot(b, &aac2), 1.0 / 60.0),
        (5, "b.AAAc", dot(b, &aaac), 1.0 / 120.0),
    ];
    table
        .into_iter()
        .filter(|(order, ..)| *order <= max_order.min(5))
        .map(|(order, label, value, expected)| OrderCondition { order, label, residual: (value - expected).abs() })
        .collect()
}

/// Order for autonomous problems: largest `q ≤ max_order` (at most 5) with
/// every condition through `q` satisfied to [`ORDER_TOL`].
pub fn autonomous_order(t: &ButcherTableau, max_order: usize) -> usize {
    let conditions = order_conditions(t, max_order);
    let mut q = 0;
    for order in 1..=max_order.min(5) {
        if conditions.iter().filter(|c| c.order == order).all(|c| c.residual <= ORDER_TOL) {
            q = order;
        } else {
            break;
        }
    }
    q
}

/// Classical order. Same as [`autonomous_order`], but capped at 1 when the
/// abscissae are not the row sums of `A`.
pub fn classical_order(t: &ButcherTableau, max_order: usize) -> usize {
    let q = autonomous_order(t, max_order);
    let consistent_c = t.row_sums().iter().zip(&t.c).all(|(r, c)| (r - c).abs() <= ORDER_TOL);
    if consistent_c {
        q
    } else {
        q.min(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_is_not_symplectic() {
        let t = ButcherTableau::explicit_euler();
        assert_eq!(check_symplectic(&t), 1.0);
        assert_eq!(classical_order(&t, 5), 1);
    }

    #[test]
    fn midpoint_properties() {
        let t = ButcherTableau::implicit_midpoint();
        assert_eq!(check_symplectic(&t), 0.0);
        assert_eq!(check_simplifying(&t, Simplifying::B, 2), 0.0);
        assert_eq!(check_simplifying(&t, Simplifying::C, 1), 0.0);
        assert_eq!(check_simplifying(&t, Simplifying::D, 1), 0.0);
        assert_eq!(classical_order(&t, 5), 2);
    }

    #[test]
    fn classical_rk4_has_order_four() {
        let t = ButcherTableau::new(
            vec![0.0, 0.5, 0.5, 1.0],
            vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0, 0.0],
                vec![0.0, 0.5, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            4,
        )
        .unwrap();
        assert_eq!(classical_order(&t, 5), 4);
        assert_eq!(order_conditions(&t, 5).len(), 17);
        assert_eq!(order_conditions(&t, 3).len(), 4);
    }

    #[test]
    fn inconsistent_abscissae_cap_order() {
        // midpoint weights with c = 3/4
        let t = ButcherTableau::new(vec![0.75], vec![1.0], vec![vec![0.5]], 1).unwrap();
        assert_eq!(autonomous_order(&t, 5), 2);
        assert_eq!(classical_order(&t, 5), 1);
    }

    #[test]
    fn shape_validation() {
        assert!(ButcherTableau::new(vec![], vec![], vec![], 0).is_err());
        assert!(ButcherTableau::new(vec![0.0, 1.0], vec![1.0], vec![vec![0.0]], 1).is_err());
        assert!(ButcherTableau::new(vec![0.0], vec![f64::NAN], vec![vec![0.0]], 1).is_err());
        let bad = r#"{"s":2,"c":[0.5],"b":[1.0],"A":[[0.5]],"declared_order":2}"#;
        assert!(serde_json::from_str::<ButcherTableau>(bad).is_err());
    }

    #[test]
    fn permutation_roundtrip() {
        let t = ButcherTableau::new(vec![0.2, 0.8], vec![0.5, 0.5], vec![vec![0.1, 0.2], vec![0.3, 0.4]], 1).unwrap();
        let d = t.descending();
        assert_eq!(d.c, vec![0.8, 0.2]);
        assert_eq!(d.a, vec![vec![0.4, 0.3], vec![0.2, 0.1]]);
        assert_eq!(d.ascending(), t);
        assert_eq!(t.max_deviation(&d).unwrap(), 0.0);
    }

    #[test]
    fn pretty_print_has_one_line_per_stage() {
        let text = ButcherTableau::implicit_midpoint().to_string();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("0.50000000000000"));
    }
}
