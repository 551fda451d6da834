//! Named methods available to `integrate` and `order-study`.

use jacobi_srk::construct::{solve_alpha, ConstructionParams};
use jacobi_srk::polybasis::JacobiBasis;
use jacobi_srk::quadrature::default_rule;
use jacobi_srk::tableau::{discretize, ButcherTableau};

use crate::CliError;

/// Name, basis parameters `(α, β)`, `(ξ, η, ρ)` and stage count.
const CONSTRUCTED: [(&str, f64, f64, usize, usize, usize, usize); 8] = [
    ("cheb3-order2", -0.5, 0.5, 2, 1, 1, 1),
    ("cheb4-order2", 0.5, -0.5, 2, 1, 1, 1),
    ("cheb3-order3", -0.5, 0.5, 3, 1, 2, 3),
    ("cheb4-order3", 0.5, -0.5, 3, 1, 2, 3),
    ("cheb3-order5", -0.5, 0.5, 5, 2, 2, 5),
    ("cheb4-order5", 0.5, -0.5, 5, 2, 2, 5),
    ("gauss-order4", 0.0, 0.0, 4, 2, 2, 2),
    ("gauss-order6", 0.0, 0.0, 6, 3, 3, 3),
];

pub fn names() -> Vec<&'static str> {
    let mut out = vec!["midpoint", "euler"];
    out.extend(CONSTRUCTED.iter().map(|m| m.0));
    out
}

/// Builds a tableau through the construction pipeline with every free
/// parameter at zero.
pub fn construct(
    alpha: f64,
    beta: f64,
    xi: usize,
    eta: usize,
    rho: usize,
    s: usize,
) -> Result<ButcherTableau, CliError> {
    let basis = JacobiBasis::new(alpha, beta)?;
    let params = ConstructionParams::new(basis, xi, eta, rho)?;
    let sol = solve_alpha(&params)?;
    Ok(discretize(&sol.particular, &default_rule(basis, s)?)?)
}

pub fn by_name(name: &str) -> Result<ButcherTableau, CliError> {
    match name {
        "midpoint" => return Ok(ButcherTableau::implicit_midpoint()),
        "euler" => return Ok(ButcherTableau::explicit_euler()),
        _ => {}
    }
    let &(_, a, b, xi, eta, rho, s) = CONSTRUCTED
        .iter()
        .find(|m| m.0 == name)
        .ok_or_else(|| CliError::Argument(format!("unknown method {name:?}; known: {}", names().join(", "))))?;
    let mut t = construct(a, b, xi, eta, rho, s)?;
    t.provenance.source = Some(name.to_string());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use jacobi_srk::tableau::{autonomous_order, check_symplectic, classical_order};

    #[test]
    fn catalogue_orders() {
        // The one-stage methods keep c away from the row sum of A.
        for name in ["cheb3-order2", "cheb4-order2"] {
            let t = by_name(name).unwrap();
            assert_eq!((autonomous_order(&t, 5), classical_order(&t, 5)), (2, 1), "{name}");
        }
        for (name, q) in [("cheb4-order3", 3), ("cheb3-order5", 5), ("gauss-order4", 4)] {
            let t = by_name(name).unwrap();
            assert_eq!(classical_order(&t, 5), q, "{name}");
            assert!(check_symplectic(&t) <= 1e-11);
        }
        assert_eq!(classical_order(&by_name("gauss-order6").unwrap(), 5), 5);
        assert!(matches!(by_name("rk4"), Err(CliError::Argument(_))));
    }
}
