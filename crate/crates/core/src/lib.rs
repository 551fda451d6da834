//! Symplectic Runge-Kutta methods from Jacobi polynomial expansions.
//!
//! The crate builds continuous-stage Runge-Kutta (csRK) coefficients whose
//! kernel is expanded in shifted, normalized Jacobi polynomials on `[0, 1]`,
//! solves the linear conditions that make the method symplectic and of a
//! prescribed order, discretizes the result with a Gauss-Christoffel rule into
//! an ordinary Butcher tableau and integrates Hamiltonian systems with it.
//!
//! Pipeline:
//!
//! ```
//! use jacobi_srk::{construct, polybasis::JacobiBasis, quadrature, tableau};
//!
//! let basis = JacobiBasis::new(-0.5, 0.5).unwrap();
//! let params = construct::ConstructionParams::new(basis, 5, 2, 2).unwrap();
//! let solution = construct::solve_alpha(&params).unwrap();
//! let rule = quadrature::chebyshev3_rule(5).unwrap();
//! let tab = tableau::discretize(&solution.particular, &rule).unwrap();
//! assert!(tableau::check_symplectic(&tab) < 1e-11);
//! assert_eq!(tableau::classical_order(&tab, 5), 5);
//! ```

pub mod construct;
pub mod error;
pub mod integrator;
pub mod polybasis;
pub mod quadrature;
pub mod reference;
pub mod systems;
pub mod tableau;

pub use error::{Error, Result};
