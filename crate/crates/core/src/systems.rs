//! Hamiltonian test problems.
//!
//! States are laid out as `z = (p_1..p_d, q_1..q_d)` and evolve by
//! `ṗ = -∂H/∂q`, `q̇ = ∂H/∂p`.

use nalgebra::DMatrix;

/// Canonical Hamiltonian system with `d` degrees of freedom.
pub trait HamiltonianSystem: Send + Sync {
    fn name(&self) -> &str;

    /// Degrees of freedom `d`; the state has length `2d`.
    fn dof(&self) -> usize;

    fn energy(&self, z: &[f64]) -> f64;

    /// `∇H = (∂H/∂p, ∂H/∂q)`.
    fn gradient(&self, z: &[f64]) -> Vec<f64>;

    /// Hessian of `H`. The default differentiates [`Self::gradient`]
    /// by central differences.
    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        let n = z.len();
        let mut hess = DMatrix::zeros(n, n);
        let mut zp = z.to_vec();
        for k in 0..n {
            let delta = 1e-6 * z[k].abs().max(1.0);
            zp[k] = z[k] + delta;
            let gp = self.gradient(&zp);
            zp[k] = z[k] - delta;
            let gm = self.gradient(&zp);
            zp[k] = z[k];
            for i in 0..n {
                hess[(i, k)] = (gp[i] - gm[i]) / (2.0 * delta);
            }
        }
        hess
    }

    /// Exact state at time `t` starting from `z0` at time 0, when known.
    fn exact_solution(&self, _z0: &[f64], _t: f64) -> Option<Vec<f64>> {
        None
    }

    /// `f(z) = (-∂H/∂q, ∂H/∂p)`.
    fn vector_field(&self, z: &[f64]) -> Vec<f64> {
        let d = self.dof();
        let grad = self.gradient(z);
        let mut f = vec![0.0; 2 * d];
        for i in 0..d {
            f[i] = -grad[d + i];
            f[d + i] = grad[i];
        }
        f
    }

    /// Jacobian of [`Self::vector_field`], assembled from the Hessian.
    fn jacobian(&self, z: &[f64]) -> DMatrix<f64> {
        let d = self.dof();
        let hess = self.hessian(z);
        DMatrix::from_fn(2 * d, 2 * d, |i, j| if i < d { -hess[(d + i, j)] } else { hess[(i - d, j)] })
    }
}

fn rotate(v: [f64; 2], angle: f64) -> [f64; 2] {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Planar Kepler problem `H = |p|^2 / 2 - 1 / |q|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kepler;

impl Kepler {
    /// `(p_1, p_2, q_1, q_2) = (0, 1, 1, 0)`: the unit circle with `H = -1/2`.
    pub const INITIAL_STATE: [f64; 4] = [0.0, 1.0, 1.0, 0.0];
}

impl HamiltonianSystem for Kepler {
    fn name(&self) -> &str {
        "kepler"
    }

    fn dof(&self) -> usize {
        2
    }

    fn energy(&self, z: &[f64]) -> f64 {
        0.5 * (z[0] * z[0] + z[1] * z[1]) - 1.0 / z[2].hypot(z[3])
    }

    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let r = z[2].hypot(z[3]);
        let r3 = r * r * r;
        vec![z[0], z[1], z[2] / r3, z[3] / r3]
    }

    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        let (q1, q2) = (z[2], z[3]);
        let r2 = q1 * q1 + q2 * q2;
        let r = r2.sqrt();
        let r3 = r2 * r;
        let r5 = r3 * r2;
        let mut h = DMatrix::zeros(4, 4);
        h[(0, 0)] = 1.0;
        h[(1, 1)] = 1.0;
        h[(2, 2)] = 1.0 / r3 - 3.0 * q1 * q1 / r5;
        h[(3, 3)] = 1.0 / r3 - 3.0 * q2 * q2 / r5;
        h[(2, 3)] = -3.0 * q1 * q2 / r5;
        h[(3, 2)] = h[(2, 3)];
        h
    }

    /// Circular orbits only (`p ⟂ q`, `|p|^2 |q| = 1`): uniform rotation.
    fn exact_solution(&self, z0: &[f64], t: f64) -> Option<Vec<f64>> {
        let (p, q) = ([z0[0], z0[1]], [z0[2], z0[3]]);
        let r = q[0].hypot(q[1]);
        let speed2 = p[0] * p[0] + p[1] * p[1];
        let dot = p[0] * q[0] + p[1] * q[1];
        if dot.abs() > 1e-14 || (speed2 * r - 1.0).abs() > 1e-14 {
            return None;
        }
        let omega = (q[0] * p[1] - q[1] * p[0]) / (r * r);
        let (p, q) = (rotate(p, omega * t), rotate(q, omega * t));
        Some(vec![p[0], p[1], q[0], q[1]])
    }
}

/// `H = (p^2 + q^2) / 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HarmonicOscillator;

impl HamiltonianSystem for HarmonicOscillator {
    fn name(&self) -> &str {
        "oscillator"
    }

    fn dof(&self) -> usize {
        1
    }

    fn energy(&self, z: &[f64]) -> f64 {
        0.5 * (z[0] * z[0] + z[1] * z[1])
    }

    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        vec![z[0], z[1]]
    }

    fn hessian(&self, _z: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(2, 2)
    }

    fn exact_solution(&self, z0: &[f64], t: f64) -> Option<Vec<f64>> {
        let (s, c) = t.sin_cos();
        Some(vec![z0[0] * c - z0[1] * s, z0[1] * c + z0[0] * s])
    }
}

/// Planar pendulum `H = p^2 / 2 - cos q`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pendulum;

impl HamiltonianSystem for Pendulum {
    fn name(&self) -> &str {
        "pendulum"
    }

    fn dof(&self) -> usize {
        1
    }

    fn energy(&self, z: &[f64]) -> f64 {
        0.5 * z[0] * z[0] - z[1].cos()
    }

    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        vec![z[0], z[1].sin()]
    }

    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, z[1].cos()])
    }
}

/// Built-in system by name: `kepler`, `oscillator`, `pendulum`.
pub fn by_name(name: &str) -> Option<Box<dyn HamiltonianSystem>> {
    match name {
        "kepler" => Some(Box::new(Kepler)),
        "oscillator" | "harmonic" => Some(Box::new(HarmonicOscillator)),
        "pendulum" => Some(Box::new(Pendulum)),
        _ => None,
    }
}

/// Conventional starting state for a built-in system.
pub fn default_initial_state(name: &str) -> Option<Vec<f64>> {
    match name {
        "kepler" => Some(Kepler::INITIAL_STATE.to_vec()),
        "oscillator" | "harmonic" => Some(vec![0.0, 1.0]),
        "pendulum" => Some(vec![0.0, 2.0]),
        _ => None,
    }
}
