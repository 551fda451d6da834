//! Shifted, normalized Jacobi polynomials on `[0, 1]`.
//!
//! `J_n^{(α,β)}` is orthonormal with respect to
//! `w(x) = 2^{α+β} (1 - x)^α x^β`. Values come from the three-term recurrence
//! of the classical Jacobi polynomials on `[-1, 1]` (mapped by `t = 2x - 1`),
//! divided by `sqrt(ε_n / 2)`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Coefficient equality tolerance for [`BasisPoly`] comparisons.
pub const COEFF_TOL: f64 = 1e-11;

#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// A Jacobi family with parameters `alpha, beta > -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBasis")]
pub struct JacobiBasis {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Deserialize)]
struct RawBasis {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawBasis> for JacobiBasis {
    type Error = Error;

    fn try_from(raw: RawBasis) -> Result<Self> {
        JacobiBasis::new(raw.alpha, raw.beta)
    }
}

impl JacobiBasis {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha <= -1.0 || beta <= -1.0 {
            return Err(Error::Argument(format!(
                "Jacobi parameters must satisfy alpha, beta > -1 (got alpha={alpha}, beta={beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn legendre() -> Self {
        Self { alpha: 0.0, beta: 0.0 }
    }

    /// Chebyshev polynomials of the first kind, `(-1/2, -1/2)`.
    pub fn chebyshev1() -> Self {
        Self { alpha: -0.5, beta: -0.5 }
    }

    pub fn chebyshev2() -> Self {
        Self { alpha: 0.5, beta: 0.5 }
    }

    /// Third kind, `(-1/2, 1/2)`: weight `sqrt(x / (1 - x))`.
    pub fn chebyshev3() -> Self {
        Self { alpha: -0.5, beta: 0.5 }
    }

    /// Fourth kind, `(1/2, -1/2)`: weight `sqrt((1 - x) / x)`.
    pub fn chebyshev4() -> Self {
        Self { alpha: 0.5, beta: -0.5 }
    }

    /// The family `(alpha + da, beta + db)`.
    pub fn shifted(&self, da: f64, db: f64) -> Result<Self> {
        Self::new(self.alpha + da, self.beta + db)
    }

    /// `(alpha + 1, beta + 1)`, the family of the derivatives.
    pub fn raised(&self) -> Self {
        Self { alpha: self.alpha + 1.0, beta: self.beta + 1.0 }
    }

    /// Swap the parameters: `(beta, alpha)`.
    pub fn mirrored(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        (self.alpha - other.alpha).abs() <= 1e-14 && (self.beta - other.beta).abs() <= 1e-14
    }

    /// `w(x) = 2^{α+β} (1 - x)^α x^β`.
    pub fn weight(&self, x: f64) -> f64 {
        (self.alpha + self.beta).exp2() * (1.0 - x).powf(self.alpha) * x.powf(self.beta)
    }

    /// Whether the weight is unbounded at `x = 0` or `x = 1`.
    pub fn is_singular_at_endpoint(&self) -> bool {
        self.alpha < 0.0 || self.beta < 0.0
    }

    fn ln_eps(&self, n: usize) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let base = (a + b + 1.0) * LN_2;
        if n == 0 {
            // Separate branch: the general formula is 0/0 when a + b = -1.
            base + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0)
        } else {
            let n = n as f64;
            base + ln_gamma(n + a + 1.0) + ln_gamma(n + b + 1.0)
                - ln_gamma(n + a + b + 1.0)
                - ln_gamma(n + 1.0)
                - (2.0 * n + a + b + 1.0).ln()
        }
    }

    /// `sqrt(ε_n / 2)`, the factor dividing the classical polynomial.
    fn scale(&self, n: usize) -> f64 {
        (0.5 * (self.ln_eps(n) - LN_2)).exp()
    }

    /// Normalization constant `ε_n`.
    pub fn norm_constant(&self, n: usize) -> Result<f64> {
        let eps = self.ln_eps(n).exp();
        if eps.is_finite() && eps > 0.0 {
            Ok(eps)
        } else {
            Err(Error::Domain(format!(
                "normalization constant eps_{n} is not finite for (alpha={}, beta={})",
                self.alpha, self.beta
            )))
        }
    }

    /// Classical (unnormalized) Jacobi values `P_0..=P_n` at `t in [-1, 1]`.
    fn classical_upto(&self, n: usize, t: f64) -> Vec<f64> {
        let (a, b) = (self.alpha, self.beta);
        let mut out = Vec::with_capacity(n + 1);
        out.push(1.0);
        if n == 0 {
            return out;
        }
        out.push((a + 1.0) + 0.5 * (a + b + 2.0) * (t - 1.0));
        for k in 2..=n {
            let k = k as f64;
            let s = 2.0 * k + a + b;
            let a1 = 2.0 * k * (k + a + b) * (s - 2.0);
            let a2 = (s - 1.0) * (a * a - b * b);
            let a3 = (s - 2.0) * (s - 1.0) * s;
            let a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
            let len = out.len();
            let next = ((a2 + a3 * t) * out[len - 1] - a4 * out[len - 2]) / a1;
            out.push(next);
        }
        out
    }

    /// `J_0(x), ..., J_n(x)`.
    pub fn eval_upto(&self, n: usize, x: f64) -> Vec<f64> {
        let mut values = self.classical_upto(n, 2.0 * x - 1.0);
        for (k, v) in values.iter_mut().enumerate() {
            *v /= self.scale(k);
        }
        values
    }

    /// `J_n^{(α,β)}(x)`. Intended for `x` in `[0, 1]`; the polynomial itself is
    /// evaluated anywhere.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        let values = self.classical_upto(n, 2.0 * x - 1.0);
        values[n] / self.scale(n)
    }

    /// `m`-th derivative of `J_n` at `x`, through
    /// `d^m/dx^m J_n^{(α,β)} = 2^m sqrt(n! Γ(n+m+α+β+1) / ((n-m)! Γ(n+α+β+1))) J_{n-m}^{(α+m,β+m)}`.
    pub fn eval_derivative(&self, n: usize, m: usize, x: f64) -> f64 {
        if m == 0 {
            return self.eval(n, x);
        }
        if m > n {
            return 0.0;
        }
        let (nf, mf) = (n as f64, m as f64);
        let ab = self.alpha + self.beta;
        let ln_factor = mf * LN_2
            + 0.5
                * (ln_gamma(nf + 1.0) + ln_gamma(nf + mf + ab + 1.0)
                    - ln_gamma(nf - mf + 1.0)
                    - ln_gamma(nf + ab + 1.0));
        let lifted = JacobiBasis { alpha: self.alpha + mf, beta: self.beta + mf };
        ln_factor.exp() * lifted.eval(n - m, x)
    }

    /// `(J_k(1), J_k(0))` from the closed endpoint formulas.
    pub fn endpoint_values(&self, k: usize) -> (f64, f64) {
        let kf = k as f64;
        let scale = self.scale(k);
        let at_one = (ln_gamma(kf + self.alpha + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(self.alpha + 1.0)).exp();
        let at_zero = (ln_gamma(kf + self.beta + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(self.beta + 1.0)).exp();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        (at_one / scale, sign * at_zero / scale)
    }

    /// `μ_k = 2 sqrt((k+1)(k+α+β+2))`.
    pub fn mu(&self, k: usize) -> f64 {
        let k = k as f64;
        2.0 * ((k + 1.0) * (k + self.alpha + self.beta + 2.0)).sqrt()
    }

    /// `τ ↦ ∫_0^τ J_k^{(α+1,β+1)}(x) dx`, written in this basis as
    /// `(J_{k+1}(τ) - J_{k+1}(0)) / μ_k`.
    pub fn antiderivative_shifted(&self, k: usize) -> BasisPoly {
        let mu = self.mu(k);
        let (_, at_zero) = self.endpoint_values(k + 1);
        let mut coeffs = vec![0.0; k + 2];
        coeffs[k + 1] = 1.0 / mu;
        // a constant c is c * sqrt(ε_0 / 2) * J_0
        coeffs[0] -= at_zero / mu * self.scale(0);
        BasisPoly { basis: *self, coeffs }
    }

    /// Unweighted `∫_0^1 J_j^{(α,β)}(σ) J_k^{(α+1,β+1)}(σ) dσ`, exact via
    /// Gauss-Legendre.
    pub fn mixed_inner_product(&self, j: usize, k: usize) -> f64 {
        let raised = self.raised();
        let points = (j + k).div_ceil(2) + 1;
        let (nodes, weights) = quadrature::gauss_legendre(points);
        nodes.iter().zip(&weights).map(|(&x, &w)| w * self.eval(j, x) * raised.eval(k, x)).sum()
    }

    /// Unweighted `∫_0^1 J_j(x) dx`.
    pub fn integral(&self, j: usize) -> f64 {
        let (nodes, weights) = quadrature::gauss_legendre(j / 2 + 1);
        nodes.iter().zip(&weights).map(|(&x, &w)| w * self.eval(j, x)).sum()
    }

    /// Coefficients of a constant in this basis (`c * sqrt(ε_0/2)` at index 0).
    pub fn constant(&self, value: f64) -> BasisPoly {
        BasisPoly { basis: *self, coeffs: vec![value * self.scale(0)] }
    }

    pub fn dump(&self, n_max: usize) -> Result<BasisDump> {
        let eps = (0..=n_max).map(|n| self.norm_constant(n)).collect::<Result<Vec<_>>>()?;
        Ok(BasisDump { alpha: self.alpha, beta: self.beta, eps })
    }
}

/// Debug view of a basis and its normalization constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDump {
    pub alpha: f64,
    pub beta: f64,
    pub eps: Vec<f64>,
}

/// A polynomial `Σ_j c_j J_j^{(α,β)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPoly {
    pub basis: JacobiBasis,
    pub coeffs: Vec<f64>,
}

impl BasisPoly {
    pub fn new(basis: JacobiBasis, coeffs: Vec<f64>) -> Self {
        Self { basis, coeffs }
    }

    pub fn zero(basis: JacobiBasis) -> Self {
        Self { basis, coeffs: Vec::new() }
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let values = self.basis.eval_upto(self.coeffs.len() - 1, x);
        self.coeffs.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(j, c)| c * self.basis.eval_derivative(j, 1, x)).sum()
    }

    /// Largest index with a coefficient above [`COEFF_TOL`]; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.abs() > COEFF_TOL)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { basis: self.basis, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.basis.approx_eq(&other.basis) {
            return Err(Error::Argument("cannot add polynomials over different Jacobi bases".into()));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|j| self.coeff(j) + other.coeff(j)).collect();
        Ok(Self { basis: self.basis, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Coefficient-wise comparison within [`COEFF_TOL`].
    pub fn approx_eq(&self, other: &Self) -> bool {
        let len = self.coeffs.len().max(other.coeffs.len());
        self.basis.approx_eq(&other.basis) && (0..len).all(|j| (self.coeff(j) - other.coeff(j)).abs() <= COEFF_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rejects_non_integrable_weight() {
        assert!(JacobiBasis::new(-1.0, 0.0).is_err());
        assert!(JacobiBasis::new(0.0, -1.5).is_err());
        assert!(JacobiBasis::new(f64::NAN, 0.0).is_err());
        assert!(JacobiBasis::new(-0.999, 3.0).is_ok());
    }

    #[test]
    fn norm_constants() {
        let leg = JacobiBasis::legendre();
        assert!(close(leg.norm_constant(0).unwrap(), 2.0, 1e-15));
        assert!(close(leg.norm_constant(1).unwrap(), 2.0 / 3.0, 1e-15));
        // α + β = -1: the n = 0 branch stays finite
        let cheb1 = JacobiBasis::chebyshev1();
        assert!(close(cheb1.norm_constant(0).unwrap(), PI, 1e-14));
        assert!(cheb1.norm_constant(1).unwrap().is_finite());
        assert!(close(JacobiBasis::new(1.0, 1.0).unwrap().norm_constant(0).unwrap(), 4.0 / 3.0, 1e-15));
    }

    #[test]
    fn low_degree_values() {
        let leg = JacobiBasis::legendre();
        assert!(close(leg.eval(0, 0.3), 1.0, 1e-15));
        assert!(close(leg.eval(1, 0.5), 0.0, 1e-15));
        for &x in &[0.0, 0.2, 0.77, 1.0] {
            assert!(close(leg.eval(1, x), 3f64.sqrt() * (2.0 * x - 1.0), 1e-14));
        }
        for basis in [JacobiBasis::chebyshev3(), JacobiBasis::new(2.5, -0.3).unwrap()] {
            let expected = 1.0 / (basis.norm_constant(0).unwrap() / 2.0).sqrt();
            assert!(close(basis.eval(0, 0.41), expected, 1e-14));
        }
    }

    #[test]
    fn chebyshev3_degree_two_roots() {
        let basis = JacobiBasis::chebyshev3();
        for root in [(3.0 * PI / 10.0).cos().powi(2), (PI / 10.0).cos().powi(2)] {
            assert!(basis.eval(2, root).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_cases() {
        let leg = JacobiBasis::legendre();
        for &x in &[0.0, 0.4, 1.0] {
            assert!(close(leg.eval_derivative(1, 1, x), 2.0 * 3f64.sqrt(), 1e-14));
        }
        assert_eq!(JacobiBasis::chebyshev4().eval_derivative(3, 4, 0.3), 0.0);
        let b = JacobiBasis::new(0.3, -0.6).unwrap();
        assert_eq!(b.eval_derivative(4, 0, 0.2), b.eval(4, 0.2));
    }

    #[test]
    fn endpoints() {
        let leg = JacobiBasis::legendre();
        let (one, zero) = leg.endpoint_values(1);
        assert!(close(one, 3f64.sqrt(), 1e-14) && close(zero, -(3f64.sqrt()), 1e-14));
        let b = JacobiBasis::chebyshev3();
        let (one, zero) = b.endpoint_values(0);
        let c = 1.0 / (b.norm_constant(0).unwrap() / 2.0).sqrt();
        assert!(close(one, c, 1e-15) && close(zero, c, 1e-15));
    }

    #[test]
    fn antiderivative_vanishes_at_zero() {
        for basis in [JacobiBasis::legendre(), JacobiBasis::chebyshev3(), JacobiBasis::new(1.5, 0.25).unwrap()] {
            for k in 0..6 {
                assert!(basis.antiderivative_shifted(k).eval(0.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn mixed_inner_product_legendre_constant() {
        // J_0^{(1,1)} = 1/sqrt(ε_0^{(1,1)}/2) with ε_0^{(1,1)} = 4/3
        let m = JacobiBasis::legendre().mixed_inner_product(0, 0);
        assert!(close(m, (1.5f64).sqrt(), 1e-14));
    }

    #[test]
    fn basis_poly_algebra() {
        let b = JacobiBasis::chebyshev2();
        let p = BasisPoly::new(b, vec![1.0, 0.0, 2.0]);
        let q = BasisPoly::new(b, vec![0.5, 1.0]);
        let sum = p.add(&q).unwrap();
        assert!(sum.approx_eq(&BasisPoly::new(b, vec![1.5, 1.0, 2.0])));
        assert!(close(sum.eval(0.3), p.eval(0.3) + q.eval(0.3), 1e-14));
        assert_eq!(sum.degree(), Some(2));
        assert_eq!(BasisPoly::new(b, vec![1.0, 1e-13]).degree(), Some(0));
        assert_eq!(BasisPoly::zero(b).degree(), None);
        assert!(p.sub(&p).unwrap().approx_eq(&BasisPoly::zero(b)));
        assert!(p.add(&BasisPoly::zero(JacobiBasis::legendre())).is_err());
        assert!(close(b.constant(2.0).eval(0.9), 2.0, 1e-14));
    }

    #[test]
    fn dump_serializes_eps() {
        let dump = JacobiBasis::legendre().dump(2).unwrap();
        assert_eq!(dump.eps.len(), 3);
        assert!(close(dump.eps[2], 2.0 / 5.0, 1e-15));
    }
}
