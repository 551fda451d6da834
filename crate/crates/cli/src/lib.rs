//! Command-line front end: construction, discretization, verification,
//! integration and the reproduction targets.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobi_srk::construct::{solve_alpha, AlphaSolution, ConstructionParams, CsRKCoefficients};
use jacobi_srk::integrator::{integrate, measured_order, OrderEstimate};
use jacobi_srk::polybasis::JacobiBasis;
use jacobi_srk::quadrature::{default_rule, gauss_jacobi};
use jacobi_srk::systems;
use jacobi_srk::tableau::{
    check_simplifying, check_symplectic, classical_order, discretize, ButcherTableau, Simplifying,
};
use serde::Serialize;
use thiserror::Error;

pub mod methods;
pub mod reproduce;

/// Highest order for which conditions are available.
pub const MAX_ORDER: usize = 5;
/// Discrete symplecticity residual accepted by `verify`.
pub const SYMPLECTIC_TOL: f64 = 1e-11;
/// Environment variable overriding the default `reproduce` output directory.
pub const OUT_DIR_ENV: &str = "JACOBI_SRK_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),
    #[error("{0}")]
    Inconsistent(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Integration(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 2 argument, 3 inconsistent construction, 4 verification, 5 integration, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Argument(_) => 2,
            CliError::Inconsistent(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Integration(_) => 5,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<jacobi_srk::Error> for CliError {
    fn from(e: jacobi_srk::Error) -> Self {
        match e {
            jacobi_srk::Error::Inconsistent { .. } => CliError::Inconsistent(e.to_string()),
            jacobi_srk::Error::StepFailed { .. } => CliError::Integration(e.to_string()),
            _ => CliError::Argument(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "jacobi-srk", version, about = "Symplectic Runge-Kutta methods from Jacobi polynomial expansions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the skew-symmetric coefficients and print them as JSON.
    Construct(ConstructArgs),
    /// Discretize coefficients into a Butcher tableau.
    Tableau(TableauArgs),
    /// Check symplecticity, simplifying assumptions and order of a tableau.
    Verify(VerifyArgs),
    /// Integrate a Hamiltonian system and write the trajectory as CSV.
    Integrate(IntegrateArgs),
    /// Measure the convergence order against an exact flow.
    OrderStudy(OrderStudyArgs),
    /// Regenerate the reference coefficients, tables and Kepler series.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Jacobi exponent on (1 - x).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Jacobi exponent on x.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Order of the B̆ assumption.
    #[arg(long)]
    pub xi: Option<usize>,
    /// Order of the C̆ assumption.
    #[arg(long)]
    pub eta: Option<usize>,
    /// Cutoff of the τ-expansion.
    #[arg(long)]
    pub rho: Option<usize>,
    /// Value of a free parameter, `index=value`; repeatable.
    #[arg(long = "free", value_name = "K=V", allow_negative_numbers = true)]
    pub free: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Write the JSON here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleChoice {
    /// Closed-form nodes for Chebyshev III/IV, eigenvalue rule otherwise.
    Closed,
    /// Always the tridiagonal eigenvalue rule.
    Eigen,
}

#[derive(Debug, Args)]
pub struct TableauArgs {
    /// Coefficients JSON as written by `construct`.
    #[arg(long, conflicts_with_all = ["alpha", "beta", "xi", "eta", "rho", "free"])]
    pub coeffs: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of quadrature nodes.
    #[arg(long)]
    pub stages: usize,
    #[arg(long, value_enum, default_value_t = RuleChoice::Closed)]
    pub rule: RuleChoice,
    /// Descending nodes for the third kind, as in the printed tables.
    #[arg(long = "paper-order")]
    pub printed_order: bool,
    /// Write the JSON here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Write the Butcher array here; defaults to stdout when `--output` is set and stderr otherwise.
    #[arg(long)]
    pub text: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Tableau JSON.
    #[arg(long)]
    pub tableau: PathBuf,
    #[arg(long, default_value_t = MAX_ORDER)]
    pub max_order: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Built-in method name.
    #[arg(long, conflicts_with = "tableau", required_unless_present = "tableau")]
    pub method: Option<String>,
    /// Tableau JSON.
    #[arg(long)]
    pub tableau: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub method: MethodArgs,
    /// kepler, oscillator or pendulum.
    #[arg(long, default_value = "kepler")]
    pub system: String,
    /// Initial state `p_1,..,p_d,q_1,..,q_d`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrderStudyArgs {
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, default_value = "kepler")]
    pub system: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
    pub step_sizes: Vec<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Ex3,
    Ex4,
    Tables,
    Kepler,
    All,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_enum, default_value_t = Target::All)]
    pub target: Target,
    /// Output directory; defaults to $JACOBI_SRK_OUT, then `reproduce-output`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Construct(a) => cmd_construct(&a),
        Command::Tableau(a) => cmd_tableau(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Integrate(a) => cmd_integrate(&a),
        Command::OrderStudy(a) => cmd_order_study(&a),
        Command::Reproduce(a) => {
            let dir = a
                .out_dir
                .clone()
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("reproduce-output"));
            let summary = reproduce::run(a.target, &dir)?;
            println!("{}", to_json(&summary)?);
            summary.into_result()
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Argument(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_tableau(path: &Path) -> Result<ButcherTableau, CliError> {
    serde_json::from_str(&read_file(path)?).map_err(|e| CliError::Argument(format!("{}: {e}", path.display())))
}

pub fn read_coefficients(path: &Path) -> Result<CsRKCoefficients, CliError> {
    let c: CsRKCoefficients =
        serde_json::from_str(&read_file(path)?).map_err(|e| CliError::Argument(format!("{}: {e}", path.display())))?;
    c.validate()?;
    Ok(c)
}

impl ParamArgs {
    pub fn to_params(&self) -> Result<ConstructionParams, CliError> {
        let missing = |name: &str| CliError::Argument(format!("--{name} is required"));
        let basis =
            JacobiBasis::new(self.alpha.ok_or_else(|| missing("alpha"))?, self.beta.ok_or_else(|| missing("beta"))?)?;
        Ok(ConstructionParams::new(
            basis,
            self.xi.ok_or_else(|| missing("xi"))?,
            self.eta.ok_or_else(|| missing("eta"))?,
            self.rho.ok_or_else(|| missing("rho"))?,
        )?)
    }

    /// Free-parameter vector of length `free_dim` from the `k=v` flags.
    pub fn free_values(&self, free_dim: usize) -> Result<Vec<f64>, CliError> {
        let mut values = vec![0.0; free_dim];
        for item in &self.free {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Argument(format!("--free expects index=value, got {item:?}")))?;
            let k: usize = k.trim().parse().map_err(|_| CliError::Argument(format!("bad free index in {item:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Argument(format!("bad free value in {item:?}")))?;
            if k >= free_dim {
                return Err(CliError::Argument(format!("free index {k} out of range (free_dim = {free_dim})")));
            }
            values[k] = v;
        }
        Ok(values)
    }

    pub fn solve(&self) -> Result<(AlphaSolution, CsRKCoefficients), CliError> {
        let sol = solve_alpha(&self.to_params()?)?;
        let coeffs = sol.with_free(&self.free_values(sol.free_dim)?)?;
        Ok((sol, coeffs))
    }
}

#[derive(Debug, Serialize)]
pub struct ConstructReport {
    #[serde(flatten)]
    pub coefficients: CsRKCoefficients,
    pub free_dim: usize,
    pub free_unknowns: Vec<(usize, usize)>,
    pub free_values: Vec<f64>,
    /// One α block per free parameter.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub null_basis: Vec<Vec<Vec<f64>>>,
    pub rank: usize,
    pub residual: f64,
}

pub fn construct_report(p: &ParamArgs) -> Result<ConstructReport, CliError> {
    let (sol, coefficients) = p.solve()?;
    Ok(ConstructReport {
        coefficients,
        free_dim: sol.free_dim,
        free_unknowns: sol.free_unknowns.clone(),
        free_values: p.free_values(sol.free_dim)?,
        null_basis: sol.null_matrices(),
        rank: sol.rank,
        residual: sol.residual,
    })
}

fn cmd_construct(a: &ConstructArgs) -> Result<(), CliError> {
    emit(a.output.as_deref(), &to_json(&construct_report(&a.params)?)?)
}

#[derive(Debug, Serialize)]
pub struct SimplifyingResiduals {
    /// Entry `k - 1` is the residual through order `k`.
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
}

impl SimplifyingResiduals {
    pub fn of(t: &ButcherTableau, max_order: usize) -> Self {
        let series = |w| (1..=max_order).map(|k| check_simplifying(t, w, k)).collect();
        Self { b: series(Simplifying::B), c: series(Simplifying::C), d: series(Simplifying::D) }
    }
}

#[derive(Debug, Serialize)]
pub struct TableauChecks {
    pub symplectic_residual: f64,
    pub simplifying: SimplifyingResiduals,
    pub classical_order: usize,
}

#[derive(Debug, Serialize)]
pub struct TableauReport {
    #[serde(flatten)]
    pub tableau: ButcherTableau,
    pub checks: TableauChecks,
}

pub fn build_tableau(a: &TableauArgs) -> Result<ButcherTableau, CliError> {
    let coeffs = match &a.coeffs {
        Some(path) => read_coefficients(path)?,
        None => a.params.solve()?.1,
    };
    let basis = coeffs.basis();
    let rule = match a.rule {
        RuleChoice::Closed => default_rule(basis, a.stages)?,
        RuleChoice::Eigen => gauss_jacobi(basis, a.stages)?,
    };
    let t = discretize(&coeffs, &rule)?;
    Ok(if a.printed_order && basis.approx_eq(&JacobiBasis::chebyshev3()) { t.descending() } else { t })
}

fn cmd_tableau(a: &TableauArgs) -> Result<(), CliError> {
    let tableau = build_tableau(a)?;
    let text = tableau.to_string();
    let report = TableauReport {
        checks: TableauChecks {
            symplectic_residual: check_symplectic(&tableau),
            simplifying: SimplifyingResiduals::of(&tableau, MAX_ORDER),
            classical_order: classical_order(&tableau, MAX_ORDER),
        },
        tableau,
    };
    emit(a.output.as_deref(), &to_json(&report)?)?;
    match (&a.text, &a.output) {
        (Some(path), _) => write_file(path, text.as_bytes()),
        (None, Some(_)) => emit(None, &text),
        (None, None) => {
            eprint!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub stages: usize,
    pub symplectic_residual: f64,
    pub symplectic_pass: bool,
    pub simplifying: SimplifyingResiduals,
    pub classical_order: usize,
    pub declared_order: usize,
    pub max_order: usize,
    /// Classical order reaches `min(declared_order, max_order)`.
    pub order_pass: bool,
    pub pass: bool,
}

pub fn verify_tableau(t: &ButcherTableau, max_order: usize) -> Result<VerifyReport, CliError> {
    if !(1..=MAX_ORDER).contains(&max_order) {
        return Err(CliError::Argument(format!("--max-order must be between 1 and {MAX_ORDER}")));
    }
    let symplectic_residual = check_symplectic(t);
    let symplectic_pass = symplectic_residual <= SYMPLECTIC_TOL;
    let order = classical_order(t, max_order);
    let order_pass = order >= t.declared_order.min(max_order);
    Ok(VerifyReport {
        stages: t.s,
        symplectic_residual,
        symplectic_pass,
        simplifying: SimplifyingResiduals::of(t, max_order),
        classical_order: order,
        declared_order: t.declared_order,
        max_order,
        order_pass,
        pass: symplectic_pass && order_pass,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let report = verify_tableau(&read_tableau(&a.tableau)?, a.max_order)?;
    emit(a.output.as_deref(), &to_json(&report)?)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "verification failed: symplectic residual {:e}, classical order {} (declared {})",
            report.symplectic_residual, report.classical_order, report.declared_order
        )))
    }
}

impl MethodArgs {
    pub fn load(&self) -> Result<ButcherTableau, CliError> {
        match (&self.method, &self.tableau) {
            (_, Some(path)) => read_tableau(path),
            (Some(name), None) => methods::by_name(name),
            (None, None) => Err(CliError::Argument("either --method or --tableau is required".into())),
        }
    }
}

fn system_and_state(
    name: &str,
    z0: &Option<Vec<f64>>,
) -> Result<(Box<dyn systems::HamiltonianSystem>, Vec<f64>), CliError> {
    let sys = systems::by_name(name).ok_or_else(|| CliError::Argument(format!("unknown system {name:?}")))?;
    let z0 = match z0 {
        Some(z) => z.clone(),
        None => systems::default_initial_state(name).expect("built-in systems have a default state"),
    };
    if z0.len() != 2 * sys.dof() {
        return Err(CliError::Argument(format!("{name} needs a state of length {}", 2 * sys.dof())));
    }
    Ok((sys, z0))
}

fn cmd_integrate(a: &IntegrateArgs) -> Result<(), CliError> {
    let t = a.method.load()?;
    let (sys, z0) = system_and_state(&a.system, &a.z0)?;
    let (traj, failure) = match integrate(&t, sys.as_ref(), &z0, a.t0, a.h, a.steps) {
        Ok(traj) => (traj, None),
        Err(e) if matches!(e.source, jacobi_srk::Error::StepFailed { .. }) => {
            let msg = e.to_string();
            (*e.partial, Some(msg))
        }
        Err(e) => return Err(e.source.into()),
    };
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).map_err(|e| CliError::io("<csv>", e))?;
    emit(a.output.as_deref(), &String::from_utf8(csv).expect("CSV is ASCII"))?;
    match failure {
        Some(msg) => Err(CliError::Integration(msg)),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
pub struct OrderStudyReport {
    pub method: String,
    pub system: String,
    pub t_end: f64,
    pub classical_order: usize,
    #[serde(flatten)]
    pub estimate: OrderEstimate,
}

fn cmd_order_study(a: &OrderStudyArgs) -> Result<(), CliError> {
    let t = a.method.load()?;
    let (sys, z0) = system_and_state(&a.system, &a.z0)?;
    let estimate = measured_order(&t, sys.as_ref(), &z0, &a.step_sizes, a.t_end)?;
    let report = OrderStudyReport {
        method: a
            .method
            .method
            .clone()
            .or_else(|| a.method.tableau.as_ref().map(|p| p.display().to_string()))
            .unwrap_or_default(),
        system: sys.name().to_string(),
        t_end: a.t_end,
        classical_order: classical_order(&t, MAX_ORDER),
        estimate,
    };
    emit(a.output.as_deref(), &to_json(&report)?)
}
