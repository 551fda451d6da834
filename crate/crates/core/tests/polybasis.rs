mod common;

use std::f64::consts::PI;

use common::weighted_integral;
use jacobi_srk::polybasis::{BasisPoly, JacobiBasis};
use jacobi_srk::quadrature::gauss_legendre;
use proptest::prelude::*;

fn classical_bases() -> Vec<JacobiBasis> {
    vec![
        JacobiBasis::legendre(),
        JacobiBasis::chebyshev1(),
        JacobiBasis::chebyshev2(),
        JacobiBasis::chebyshev3(),
        JacobiBasis::chebyshev4(),
    ]
}

fn basis_strategy() -> impl Strategy<Value = JacobiBasis> {
    (-0.9f64..3.0, -0.9f64..3.0).prop_map(|(a, b)| JacobiBasis::new(a, b).unwrap())
}

#[test]
fn orthonormal_against_adaptive_quadrature() {
    for basis in classical_bases() {
        for n in 0..=10 {
            for m in 0..=n {
                let ip = weighted_integral(basis.alpha, basis.beta, |x| basis.eval(n, x) * basis.eval(m, x));
                let expected = if n == m { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-10, "{basis:?} <{n},{m}> = {ip}");
            }
        }
    }
}

#[test]
fn orthonormal_for_raised_parameters() {
    let basis = JacobiBasis::new(1.5, 0.5).unwrap();
    for n in 0..=6 {
        for m in 0..=n {
            let ip = weighted_integral(1.5, 0.5, |x| basis.eval(n, x) * basis.eval(m, x));
            assert!((ip - if n == m { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
}

#[test]
fn symmetry_relation_on_grid() {
    for basis in classical_bases().into_iter().chain([JacobiBasis::new(0.3, -0.6).unwrap()]) {
        let mirror = basis.mirrored();
        for k in 0..=10 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..100 {
                let x = i as f64 / 99.0;
                let diff = basis.eval(k, 1.0 - x) - sign * mirror.eval(k, x);
                assert!(diff.abs() <= 1e-11, "{basis:?} k={k} x={x}: {diff}");
            }
        }
    }
}

#[test]
fn sign_changes_match_degree() {
    for basis in classical_bases() {
        for n in 0..=8 {
            let mut changes = 0;
            let mut prev = basis.eval(n, 1e-4);
            for i in 1..=4000 {
                let v = basis.eval(n, 1e-4 + i as f64 * (1.0 - 2e-4) / 4000.0);
                if v == 0.0 {
                    continue;
                }
                if v * prev < 0.0 {
                    changes += 1;
                }
                prev = v;
            }
            assert_eq!(changes, n, "{basis:?} degree {n}");
        }
    }
}

#[test]
fn chebyshev_closed_forms() {
    // First kind: J_n = 2 T_n(2x-1) / √π for n ≥ 1.
    let t = JacobiBasis::chebyshev1();
    for n in 1..=6 {
        for &x in &[0.1, 0.37, 0.8] {
            let theta = (2.0 * x - 1.0f64).acos();
            let expected = (n as f64 * theta).cos() * 2.0 / PI.sqrt();
            assert!((t.eval(n, x) - expected).abs() < 1e-13);
        }
    }
    // Third kind: V_n(cos θ) = cos((n+1/2)θ) / cos(θ/2).
    let v = JacobiBasis::chebyshev3();
    for n in 0..=6 {
        for &x in &[0.2, 0.5, 0.9] {
            let theta = (2.0 * x - 1.0f64).acos();
            let vn = ((n as f64 + 0.5) * theta).cos() / (0.5 * theta).cos();
            assert!((v.eval(n, x) - vn * (2.0 / PI).sqrt()).abs() < 1e-13);
        }
    }
}

#[test]
fn antiderivative_matches_adaptive_quadrature() {
    let basis = JacobiBasis::chebyshev1();
    let raised = basis.raised();
    let poly = basis.antiderivative_shifted(0);
    for &tau in &[0.25, 0.5, 0.75] {
        let oracle = common::adaptive_integral(|x| raised.eval(0, x), 0.0, tau, 1e-15);
        assert!((poly.eval(tau) - oracle).abs() < 1e-12);
    }
    for basis in classical_bases() {
        let raised = basis.raised();
        for k in 0..6 {
            let poly = basis.antiderivative_shifted(k);
            assert!(poly.eval(0.0).abs() < 1e-14);
            let (top, bottom) = basis.endpoint_values(k + 1);
            assert!((poly.eval(1.0) - (top - bottom) / basis.mu(k)).abs() < 1e-12);
            for &tau in &[0.13, 0.6, 0.97] {
                let oracle = common::adaptive_integral(|x| raised.eval(k, x), 0.0, tau, 1e-15);
                assert!((poly.eval(tau) - oracle).abs() < 1e-12, "{basis:?} k={k}");
            }
        }
    }
}

#[test]
fn mixed_inner_product_matches_adaptive_quadrature() {
    for basis in classical_bases() {
        let raised = basis.raised();
        for j in 0..=6 {
            for k in 0..=6 {
                let oracle = common::adaptive_integral(|x| basis.eval(j, x) * raised.eval(k, x), 0.0, 1.0, 1e-15);
                let m = basis.mixed_inner_product(j, k);
                assert!((m - oracle).abs() < 1e-12, "{basis:?} m_{j}{k}: {m} vs {oracle}");
            }
        }
    }
}

#[test]
fn legendre_mixed_products_vanish_below_diagonal() {
    let basis = JacobiBasis::legendre();
    for j in 0..=6 {
        for k in 0..j {
            assert!(basis.mixed_inner_product(j, k).abs() < 1e-13);
        }
    }
    // Not true in general: the unweighted product for the third kind.
    assert!(JacobiBasis::chebyshev3().mixed_inner_product(2, 0).abs() > 0.1);
}

#[test]
fn endpoints_agree_with_evaluation() {
    for basis in classical_bases().into_iter().chain([JacobiBasis::new(2.2, 0.7).unwrap()]) {
        for k in 0..=10 {
            let (top, bottom) = basis.endpoint_values(k);
            let scale = top.abs().max(1.0);
            assert!((top - basis.eval(k, 1.0)).abs() < 1e-12 * scale);
            assert!((bottom - basis.eval(k, 0.0)).abs() < 1e-12 * bottom.abs().max(1.0));
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((top - sign * basis.mirrored().endpoint_values(k).1).abs() < 1e-12 * scale);
        }
    }
}

#[test]
fn gauss_legendre_is_exact_for_integrals() {
    for basis in classical_bases() {
        for j in 0..8 {
            let (x, w) = gauss_legendre(12);
            let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * basis.eval(j, *x)).sum();
            let oracle = common::adaptive_integral(|x| basis.eval(j, x), 0.0, 1.0, 1e-15);
            assert!((basis.integral(j) - oracle).abs() < 1e-12);
            assert!((quad - oracle).abs() < 1e-12);
        }
    }
}

fn five_point_derivative(basis: &JacobiBasis, n: usize, x: f64) -> f64 {
    let h = 1e-3;
    let f = |t: f64| basis.eval(n, t);
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

proptest! {
    #[test]
    fn derivative_matches_finite_differences(basis in basis_strategy(), n in 1usize..9, x in 0.05f64..0.95) {
        let exact = basis.eval_derivative(n, 1, x);
        let fd = five_point_derivative(&basis, n, x);
        prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "{} vs {}", exact, fd);
    }

    #[test]
    fn second_derivative_composes(basis in basis_strategy(), n in 2usize..8, x in 0.05f64..0.95) {
        let h = 1e-3;
        let d = |t: f64| basis.eval_derivative(n, 1, t);
        let fd = (-d(x + 2.0 * h) + 8.0 * d(x + h) - 8.0 * d(x - h) + d(x - 2.0 * h)) / (12.0 * h);
        let exact = basis.eval_derivative(n, 2, x);
        prop_assert!((exact - fd).abs() <= 1e-5 * exact.abs().max(1.0));
    }

    #[test]
    fn antiderivative_differentiates_back(basis in basis_strategy(), k in 0usize..8, tau in 0.02f64..0.98) {
        let poly = basis.antiderivative_shifted(k);
        let d = poly.eval_derivative(tau);
        prop_assert!((d - basis.raised().eval(k, tau)).abs() <= 1e-10 * d.abs().max(1.0));
    }

    #[test]
    fn symmetry_for_random_parameters(basis in basis_strategy(), k in 0usize..11, x in 0.0f64..1.0) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = basis.eval(k, 1.0 - x);
        let rhs = sign * basis.mirrored().eval(k, x);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
    }

    #[test]
    fn basis_poly_is_linear(coeffs in prop::collection::vec(-2.0f64..2.0, 1..7), x in 0.0f64..1.0) {
        let basis = JacobiBasis::chebyshev3();
        let p = BasisPoly::new(basis, coeffs.clone());
        let direct: f64 = coeffs.iter().enumerate().map(|(j, c)| c * basis.eval(j, x)).sum();
        prop_assert!((p.eval(x) - direct).abs() < 1e-12);
        let doubled = p.add(&p).unwrap();
        prop_assert!(doubled.approx_eq(&p.scale(2.0)));
    }
}
