//! Implicit Runge-Kutta stepping for Hamiltonian systems and the usual
//! long-time diagnostics: energy and solution errors, observed convergence
//! order and symplecticity of the numerical flow.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::systems::HamiltonianSystem;
use crate::tableau::ButcherTableau;

/// Stopping rule for the Newton iteration on the stage equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Max-norm bound on the stage-equation residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-13, max_iter: 50 }
    }
}

/// Converged internal stages of one step.
#[derive(Debug, Clone)]
pub struct Stages {
    pub values: Vec<Vec<f64>>,
    /// `f(Z_i)` at the converged stages.
    pub derivatives: Vec<Vec<f64>>,
    pub residual: f64,
    pub iterations: usize,
}

fn stage_defect(
    t: &ButcherTableau,
    sys: &dyn HamiltonianSystem,
    z0: &[f64],
    h: f64,
    values: &[Vec<f64>],
) -> (Vec<Vec<f64>>, DVector<f64>) {
    let n = z0.len();
    let derivs: Vec<Vec<f64>> = values.iter().map(|z| sys.vector_field(z)).collect();
    let mut defect = DVector::zeros(t.s * n);
    for i in 0..t.s {
        for k in 0..n {
            let sum: f64 = (0..t.s).map(|j| t.a[i][j] * derivs[j][k]).sum();
            defect[i * n + k] = values[i][k] - z0[k] - h * sum;
        }
    }
    (derivs, defect)
}

/// Max-norm residual of `Z_i - z0 - h Σ_j a_ij f(Z_j)` for given stages.
pub fn stage_residual(t: &ButcherTableau, sys: &dyn HamiltonianSystem, z0: &[f64], h: f64, values: &[Vec<f64>]) -> f64 {
    stage_defect(t, sys, z0, h, values).1.amax()
}

/// Solves the stage equations by full Newton iteration starting from `Z_i = z0`.
pub fn solve_stages(
    t: &ButcherTableau,
    sys: &dyn HamiltonianSystem,
    z0: &[f64],
    h: f64,
    opts: &NewtonOptions,
) -> Result<Stages> {
    let (s, n) = (t.s, z0.len());
    if n != 2 * sys.dof() {
        return Err(Error::Argument(format!("state has length {n}, system {} expects {}", sys.name(), 2 * sys.dof())));
    }
    if !h.is_finite() {
        return Err(Error::Argument(format!("step size {h} is not finite")));
    }
    let mut values = vec![z0.to_vec(); s];
    let mut iterations = 0;
    loop {
        let (derivatives, defect) = stage_defect(t, sys, z0, h, &values);
        let residual = defect.amax();
        if residual <= opts.tol {
            return Ok(Stages { values, derivatives, residual, iterations });
        }
        if iterations == opts.max_iter || !residual.is_finite() {
            return Err(Error::StepFailed { iterations, residual });
        }
        let jacobians: Vec<DMatrix<f64>> = values.iter().map(|z| sys.jacobian(z)).collect();
        let mut m = DMatrix::identity(s * n, s * n);
        for i in 0..s {
            for (j, jac) in jacobians.iter().enumerate() {
                let scale = h * t.a[i][j];
                if scale == 0.0 {
                    continue;
                }
                let mut block = m.view_mut((i * n, j * n), (n, n));
                block -= jac * scale;
            }
        }
        let delta = m.lu().solve(&defect).ok_or(Error::StepFailed { iterations, residual })?;
        for i in 0..s {
            for k in 0..n {
                values[i][k] -= delta[i * n + k];
            }
        }
        iterations += 1;
    }
}

/// One step `z1 = z0 + h Σ b_i f(Z_i)` with the default Newton options.
pub fn rk_step(t: &ButcherTableau, sys: &dyn HamiltonianSystem, z0: &[f64], t0: f64, h: f64) -> Result<Vec<f64>> {
    rk_step_with(t, sys, z0, t0, h, &NewtonOptions::default())
}

/// The systems are autonomous, so `t0` only labels the step.
pub fn rk_step_with(
    t: &ButcherTableau,
    sys: &dyn HamiltonianSystem,
    z0: &[f64],
    _t0: f64,
    h: f64,
    opts: &NewtonOptions,
) -> Result<Vec<f64>> {
    let stages = solve_stages(t, sys, z0, h, opts)?;
    Ok(advance(t, z0, h, &stages))
}

fn advance(t: &ButcherTableau, z0: &[f64], h: f64, stages: &Stages) -> Vec<f64> {
    (0..z0.len()).map(|k| z0[k] + h * (0..t.s).map(|i| t.b[i] * stages.derivatives[i][k]).sum::<f64>()).collect()
}

/// Recorded numerical solution; index 0 is the initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `|H(z_n) - H(z_0)|`.
    pub energy_error: Vec<f64>,
    /// Euclidean distance to the exact flow, when the system provides one.
    pub solution_error: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        self.states.last().map(|v| v.as_slice())
    }

    pub fn max_energy_error(&self) -> f64 {
        self.energy_error.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_solution_error(&self) -> Option<f64> {
        self.solution_error.as_ref().map(|e| e.iter().copied().fold(0.0, f64::max))
    }

    /// Writes `t,z_1..z_2d,energy_err[,sol_err]` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let dim = self.states.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=dim).map(|k| format!("z_{k}")));
        header.push("energy_err".into());
        if self.solution_error.is_some() {
            header.push("sol_err".into());
        }
        writeln!(w, "{}", header.join(","))?;
        for n in 0..self.len() {
            let mut row = Vec::with_capacity(dim + 3);
            row.push(self.times[n]);
            row.extend_from_slice(&self.states[n]);
            row.push(self.energy_error[n]);
            if let Some(e) = &self.solution_error {
                row.push(e[n]);
            }
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// A step failure during [`integrate`], with everything computed before it.
#[derive(Debug, Clone, thiserror::Error)]
#[error("step {step} failed: {source}")]
pub struct IntegrationError {
    /// Index of the step that failed (1-based, matching the trajectory row).
    pub step: usize,
    pub source: Error,
    pub partial: Box<Trajectory>,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn integrate(
    t: &ButcherTableau,
    sys: &dyn HamiltonianSystem,
    z0: &[f64],
    t0: f64,
    h: f64,
    n_steps: usize,
) -> std::result::Result<Trajectory, IntegrationError> {
    integrate_with(t, sys, z0, t0, h, n_steps, &NewtonOptions::default())
}

/// Fixed-step integration. The exact flow is queried at elapsed time `t_n - t0`.
pub fn integrate_with(
    t: &ButcherTableau,
    sys: &dyn HamiltonianSystem,
    z0: &[f64],
    t0: f64,
    h: f64,
    n_steps: usize,
    opts: &NewtonOptions,
) -> std::result::Result<Trajectory, IntegrationError> {
    let h0 = sys.energy(z0);
    let track_exact = sys.exact_solution(z0, 0.0).is_some();
    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![z0.to_vec()],
        energy_error: vec![0.0],
        solution_error: track_exact.then(|| vec![0.0]),
    };
    let mut z = z0.to_vec();
    for step in 1..=n_steps {
        let tn = t0 + (step - 1) as f64 * h;
        z = match rk_step_with(t, sys, &z, tn, h, opts) {
            Ok(z) => z,
            Err(source) => return Err(IntegrationError { step, source, partial: Box::new(traj) }),
        };
        let elapsed = step as f64 * h;
        traj.times.push(t0 + elapsed);
        traj.energy_error.push((sys.energy(&z) - h0).abs());
        if let Some(errs) = traj.solution_error.as_mut() {
            let exact = sys.exact_solution(z0, elapsed).expect("exact flow available at t = 0");
            errs.push(euclid(&z, &exact));
        }
        traj.states.push(z.clone());
    }
    Ok(traj)
}

/// Least-squares slope of `y` against `x`.
pub fn linear_fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Observed convergence order from global errors at a fixed final time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub slope: f64,
    pub step_sizes: Vec<f64>,
    pub errors: Vec<f64>,
    /// Some error sits at the round-off floor, so the slope is unreliable.
    pub floor_reached: bool,
}

/// Errors below this are treated as round-off dominated.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Fits `log(error at t_end)` against `log h` over a geometric list of step sizes.
pub fn measured_order(
    t: &ButcherTableau,
    sys: &dyn HamiltonianSystem,
    z0: &[f64],
    step_sizes: &[f64],
    t_end: f64,
) -> Result<OrderEstimate> {
    if step_sizes.len() < 3 {
        return Err(Error::Argument("at least three step sizes are needed".into()));
    }
    if step_sizes.iter().any(|&h| !h.is_finite() || h <= 0.0) {
        return Err(Error::Argument("step sizes must be positive".into()));
    }
    let ratio = step_sizes[1] / step_sizes[0];
    if step_sizes.windows(2).any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9) || ratio == 1.0 {
        return Err(Error::Argument("step sizes must form a geometric sequence".into()));
    }
    let exact = sys
        .exact_solution(z0, t_end)
        .ok_or_else(|| Error::Argument(format!("{} has no exact flow from this state", sys.name())))?;
    let mut errors = Vec::with_capacity(step_sizes.len());
    for &h in step_sizes {
        let steps = (t_end / h).round();
        if ((steps * h) - t_end).abs() > 1e-12 * t_end.abs().max(1.0) {
            return Err(Error::Argument(format!("step size {h} does not divide {t_end}")));
        }
        let mut z = z0.to_vec();
        for k in 0..steps as usize {
            z = rk_step(t, sys, &z, k as f64 * h, h)?;
        }
        errors.push(euclid(&z, &exact));
    }
    let lx: Vec<f64> = step_sizes.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(OrderEstimate {
        slope: linear_fit_slope(&lx, &ly),
        step_sizes: step_sizes.to_vec(),
        floor_reached: errors.iter().any(|&e| e < ERROR_FLOOR),
        errors,
    })
}

/// Canonical structure matrix `[[0, -I], [I, 0]]` for the `(p, q)` layout.
pub fn structure_matrix(d: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = -1.0;
        j[(d + i, i)] = 1.0;
    }
    j
}

/// `‖ψᵀJψ - J‖_max` for the one-step map, `ψ` by central differences.
pub fn flow_symplecticity(t: &ButcherTableau, sys: &dyn HamiltonianSystem, z0: &[f64], h: f64) -> Result<f64> {
    const DELTA: f64 = 1e-6;
    let opts = NewtonOptions { tol: 1e-14, max_iter: 50 };
    let n = z0.len();
    let mut psi = DMatrix::zeros(n, n);
    let mut z = z0.to_vec();
    for k in 0..n {
        let (up, down) = (z0[k] + DELTA, z0[k] - DELTA);
        z[k] = up;
        let plus = rk_step_with(t, sys, &z, 0.0, h, &opts)?;
        z[k] = down;
        let minus = rk_step_with(t, sys, &z, 0.0, h, &opts)?;
        z[k] = z0[k];
        // Divide by the representable spacing so that h = 0 gives ψ = I exactly.
        for i in 0..n {
            psi[(i, k)] = (plus[i] - minus[i]) / (up - down);
        }
    }
    let j = structure_matrix(sys.dof());
    Ok((psi.transpose() * &j * psi - j).amax())
}

/// Max-norm distance from `z0` after a step of `h` followed by a step of `-h`.
pub fn adjoint_defect(t: &ButcherTableau, sys: &dyn HamiltonianSystem, z0: &[f64], h: f64) -> Result<f64> {
    let z1 = rk_step(t, sys, z0, 0.0, h)?;
    let back = rk_step(t, sys, &z1, h, -h)?;
    Ok(back.iter().zip(z0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{HarmonicOscillator, Kepler};

    #[test]
    fn midpoint_matches_cayley_rotation() {
        let t = ButcherTableau::implicit_midpoint();
        let h = 0.1;
        let z1 = rk_step(&t, &HarmonicOscillator, &[0.0, 1.0], 0.0, h).unwrap();
        // Ω = [[0, -1], [1, 0]]; (I - hΩ/2)^{-1}(I + hΩ/2) z0
        let omega = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let id = DMatrix::<f64>::identity(2, 2);
        let cayley = (&id - &omega * (h / 2.0)).try_inverse().unwrap() * (&id + &omega * (h / 2.0));
        let expected = cayley * DVector::from_vec(vec![0.0, 1.0]);
        assert!((z1[0] - expected[0]).abs() < 1e-13);
        assert!((z1[1] - expected[1]).abs() < 1e-13);
    }

    #[test]
    fn zero_step_is_identity() {
        let t = ButcherTableau::implicit_midpoint();
        let z0 = Kepler::INITIAL_STATE;
        assert_eq!(rk_step(&t, &Kepler, &z0, 0.0, 0.0).unwrap(), z0.to_vec());
        assert_eq!(flow_symplecticity(&t, &Kepler, &z0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn stage_residual_contract() {
        let t = ButcherTableau::implicit_midpoint();
        let z0 = Kepler::INITIAL_STATE;
        let st = solve_stages(&t, &Kepler, &z0, 0.1, &NewtonOptions::default()).unwrap();
        assert!(stage_residual(&t, &Kepler, &z0, 0.1, &st.values) <= 1e-13);
    }

    #[test]
    fn newton_cap_reports_residual() {
        let t = ButcherTableau::implicit_midpoint();
        let opts = NewtonOptions { tol: 0.0, max_iter: 2 };
        match solve_stages(&t, &Kepler, &Kepler::INITIAL_STATE, 0.1, &opts) {
            Err(Error::StepFailed { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partial_trajectory_on_failure() {
        let t = ButcherTableau::implicit_midpoint();
        // Step size large enough to pull the orbit through the singularity.
        let err = integrate(&t, &Kepler, &[0.0, 0.0, 1.0, 0.0], 0.0, 5.0, 10).unwrap_err();
        assert_eq!(err.partial.len(), err.step);
    }

    #[test]
    fn trajectory_bookkeeping_and_csv() {
        let t = ButcherTableau::implicit_midpoint();
        let traj = integrate(&t, &Kepler, &Kepler::INITIAL_STATE, 0.0, 0.1, 5).unwrap();
        assert_eq!(traj.len(), 6);
        assert_eq!(traj.states.len(), 6);
        assert_eq!(traj.solution_error.as_ref().unwrap().len(), 6);
        for (n, &tn) in traj.times.iter().enumerate() {
            assert!((tn - 0.1 * n as f64).abs() < 1e-15);
        }
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,z_1,z_2,z_3,z_4,energy_err,sol_err");
        let row: Vec<f64> = lines.nth(2).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(row.len(), 7);
        assert_eq!(row[1..5], traj.states[2][..]);
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn midpoint_order_two() {
        let t = ButcherTableau::implicit_midpoint();
        let est = measured_order(&t, &HarmonicOscillator, &[0.0, 1.0], &[0.1, 0.05, 0.025, 0.0125], 1.0).unwrap();
        assert!((est.slope - 2.0).abs() < 0.1, "{est:?}");
        assert!(!est.floor_reached);
    }

    #[test]
    fn order_rejects_bad_step_lists() {
        let t = ButcherTableau::implicit_midpoint();
        let z0 = [0.0, 1.0];
        assert!(measured_order(&t, &HarmonicOscillator, &z0, &[0.1, 0.05], 1.0).is_err());
        assert!(measured_order(&t, &HarmonicOscillator, &z0, &[0.1, 0.05, 0.02], 1.0).is_err());
    }

    #[test]
    fn euler_is_not_symplectic() {
        let r = flow_symplecticity(&ButcherTableau::explicit_euler(), &HarmonicOscillator, &[0.0, 1.0], 0.1).unwrap();
        assert!(r >= 1e-3);
        let r = flow_symplecticity(&ButcherTableau::implicit_midpoint(), &Kepler, &Kepler::INITIAL_STATE, 0.1).unwrap();
        assert!(r <= 1e-7);
    }

    #[test]
    fn midpoint_is_self_adjoint() {
        let t = ButcherTableau::implicit_midpoint();
        assert!(adjoint_defect(&t, &Kepler, &Kepler::INITIAL_STATE, 0.1).unwrap() < 1e-13);
    }

    #[test]
    fn fit_slope_of_line() {
        assert!((linear_fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }
}
