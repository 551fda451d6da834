//! Reproduction targets: coefficient values, tables and Kepler error series.
//!
//! Everything here is deterministic, so two runs write identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use jacobi_srk::construct::{solve_alpha, ConstructionParams};
use jacobi_srk::integrator::{integrate, linear_fit_slope, Trajectory};
use jacobi_srk::polybasis::JacobiBasis;
use jacobi_srk::reference::{self, alpha_references, family_relation};
use jacobi_srk::systems::Kepler;
use jacobi_srk::tableau::{check_symplectic, classical_order, ButcherTableau};
use serde::Serialize;

use crate::{methods, to_json, write_file, CliError, Target, MAX_ORDER};

pub const ALPHA_TOL: f64 = 1e-12;
pub const CLOSED_FORM_TOL: f64 = 1e-12;
pub const PRINTED_DIGITS_TOL: f64 = 1e-11;
pub const GOLDEN_SYMPLECTIC_TOL: f64 = 1e-13;
pub const GENERATED_SYMPLECTIC_TOL: f64 = 1e-11;
pub const ENERGY_THRESHOLD: f64 = 5e-4;
pub const ENERGY_SLOPE_TOL: f64 = 1e-9;
pub const KEPLER_STEP: f64 = 0.1;
pub const KEPLER_STEPS: usize = 10_000;
pub const GOLDEN_GAMMAS: [f64; 3] = [-0.3, 0.0, 0.1];
pub const KEPLER_METHODS: [&str; 6] =
    ["cheb3-order3", "cheb4-order3", "cheb3-order5", "cheb4-order5", "gauss-order4", "gauss-order6"];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetSummary {
    pub target: String,
    /// Largest checked value.
    pub max_deviation: f64,
    pub pass: bool,
    pub checks: Vec<Check>,
    /// Informational values that are not checked.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

impl TargetSummary {
    fn new(target: &str, checks: Vec<Check>, metrics: BTreeMap<String, f64>, files: Vec<String>) -> Self {
        Self {
            target: target.to_string(),
            max_deviation: checks.iter().map(|c| c.value).fold(0.0, f64::max),
            pass: checks.iter().all(|c| c.pass),
            checks,
            metrics,
            files,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub targets: Vec<TargetSummary>,
}

impl Summary {
    pub fn into_result(self) -> Result<(), CliError> {
        if self.pass {
            return Ok(());
        }
        let failed: Vec<String> = self
            .targets
            .iter()
            .flat_map(|t| {
                t.failures().map(move |c| format!("{}: {} = {:e} > {:e}", t.target, c.name, c.value, c.tolerance))
            })
            .collect();
        Err(CliError::Verification(format!("reproduction deviations:\n  {}", failed.join("\n  "))))
    }
}

/// Runs `target` and writes its artifacts plus `summary.json` into `dir`.
pub fn run(target: Target, dir: &Path) -> Result<Summary, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let targets = match target {
        Target::Ex3 => vec![examples(dir, 3)?],
        Target::Ex4 => vec![examples(dir, 4)?],
        Target::Tables => vec![tables(dir)?],
        Target::Kepler => vec![kepler(dir)?],
        Target::All => vec![examples(dir, 3)?, examples(dir, 4)?, tables(dir)?, kepler(dir)?],
    };
    let summary = Summary { pass: targets.iter().all(|t| t.pass), targets };
    write_file(&dir.join("summary.json"), to_json(&summary)?.as_bytes())?;
    Ok(summary)
}

#[derive(Serialize)]
struct AlphaEntry {
    name: String,
    #[serde(flatten)]
    params: ConstructionParams,
    free_dim: usize,
    free_values: Vec<f64>,
    alpha_mat: Vec<Vec<f64>>,
}

/// Skew-symmetric coefficients for the Chebyshev III (`kind = 3`) or IV
/// (`kind = 4`) constructions.
fn examples(dir: &Path, kind: u8) -> Result<TargetSummary, CliError> {
    let prefix = format!("chebyshev{kind}-");
    let mut checks = Vec::new();
    let mut entries = Vec::new();
    for r in alpha_references().into_iter().filter(|r| r.name.starts_with(&prefix)) {
        let params = ConstructionParams::new(JacobiBasis::new(r.alpha, r.beta)?, r.xi, r.eta, r.rho)?;
        let sol = solve_alpha(&params)?;
        let coeffs = sol.with_free(&r.free)?;
        for &((i, j), expected) in &r.values {
            checks.push(Check::new(
                format!("{} alpha({i},{j})", r.name),
                (coeffs.alpha(i, j) - expected).abs(),
                ALPHA_TOL,
            ));
        }
        if sol.free_dim == 1 {
            for mu in [-1.0, 1.0] {
                let member = sol.with_free(&[mu])?;
                let (a01, a02) = family_relation(kind, mu);
                let dev = (member.alpha(0, 1) - a01)
                    .abs()
                    .max((member.alpha(0, 2) - a02).abs())
                    .max((member.alpha(1, 2) - mu).abs());
                checks.push(Check::new(format!("{} family mu={mu}", r.name), dev, ALPHA_TOL));
            }
        }
        entries.push(AlphaEntry {
            name: r.name.clone(),
            params,
            free_dim: sol.free_dim,
            free_values: r.free.clone(),
            alpha_mat: coeffs.alpha_mat,
        });
    }
    let file = format!("ex{kind}.json");
    write_file(&dir.join(&file), to_json(&entries)?.as_bytes())?;
    Ok(TargetSummary::new(&format!("ex{kind}"), checks, BTreeMap::new(), vec![file]))
}

fn order_check(name: &str, t: &ButcherTableau, expected: usize) -> Check {
    let q = classical_order(t, MAX_ORDER);
    Check::new(format!("{name} order"), (q as f64 - expected as f64).abs(), 0.0)
}

/// Generated three- and five-stage tableaux against the published ones, and
/// the quoted Chebyshev I/II families as golden inputs.
fn tables(dir: &Path) -> Result<TargetSummary, CliError> {
    let mut checks = Vec::new();
    let mut files = Vec::new();
    let cases = [
        ("chebyshev3-order3", "cheb3-order3", reference::chebyshev3_order3(), CLOSED_FORM_TOL, 3, true),
        ("chebyshev4-order3", "cheb4-order3", reference::chebyshev4_order3(), CLOSED_FORM_TOL, 3, false),
        ("chebyshev3-order5", "cheb3-order5", reference::chebyshev3_order5(), PRINTED_DIGITS_TOL, 5, true),
        ("chebyshev4-order5", "cheb4-order5", reference::chebyshev4_order5(), PRINTED_DIGITS_TOL, 5, false),
    ];
    for (name, method, published, tol, order, descending) in cases {
        let generated = methods::by_name(method)?;
        checks.push(Check::new(format!("{name} entries"), generated.max_deviation(&published)?, tol));
        checks.push(Check::new(format!("{name} symplectic"), check_symplectic(&generated), GENERATED_SYMPLECTIC_TOL));
        checks.push(order_check(name, &generated, order));
        let printed = if descending { generated.descending() } else { generated };
        let file = format!("{name}.json");
        write_file(&dir.join(&file), to_json(&printed)?.as_bytes())?;
        files.push(file);
    }
    for gamma in GOLDEN_GAMMAS {
        for (family, t) in
            [("chebyshev1", reference::chebyshev1_family(gamma)), ("chebyshev2", reference::chebyshev2_family(gamma))]
        {
            let name = format!("{family}-family gamma={gamma}");
            checks.push(Check::new(format!("{name} symplectic"), check_symplectic(&t), GOLDEN_SYMPLECTIC_TOL));
            checks.push(order_check(&name, &t, 4));
        }
    }
    Ok(TargetSummary::new("tables", checks, BTreeMap::new(), files))
}

fn series_csv(times: &[f64], columns: &[(&str, &[f64])]) -> String {
    let mut out = String::from("t");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (n, t) in times.iter().enumerate() {
        write!(out, "{t:.16e}").expect("writing to a String");
        for (_, values) in columns {
            write!(out, ",{:.16e}", values[n]).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

/// Kepler runs at `h = 0.1` over `10⁴` steps: one full trajectory CSV per
/// method plus solution- and energy-error series for orders 3 and 5.
fn kepler(dir: &Path) -> Result<TargetSummary, CliError> {
    let z0 = Kepler::INITIAL_STATE;
    let mut checks = Vec::new();
    let mut metrics = BTreeMap::new();
    let mut files = Vec::new();
    let mut runs: BTreeMap<&str, Trajectory> = BTreeMap::new();
    for name in KEPLER_METHODS {
        let t = methods::by_name(name)?;
        let traj = integrate(&t, &Kepler, &z0, 0.0, KEPLER_STEP, KEPLER_STEPS)
            .map_err(|e| CliError::Integration(format!("{name}: {e}")))?;
        checks.push(Check::new(format!("{name} max energy error"), traj.max_energy_error(), ENERGY_THRESHOLD));
        let slope = linear_fit_slope(&traj.times, &traj.energy_error);
        checks.push(Check::new(format!("{name} energy drift"), slope.abs(), ENERGY_SLOPE_TOL));
        metrics.insert(format!("{name} max solution error"), traj.max_solution_error().unwrap_or(f64::NAN));
        let mut csv = Vec::new();
        traj.write_csv(&mut csv).map_err(|e| CliError::io("<csv>", e))?;
        let file = format!("kepler_{name}.csv");
        write_file(&dir.join(&file), &csv)?;
        files.push(file);
        runs.insert(name, traj);
    }
    for order in [3, 5] {
        let names = [format!("cheb3-order{order}"), format!("cheb4-order{order}")];
        let trajs: Vec<&Trajectory> = names.iter().map(|n| &runs[n.as_str()]).collect();
        let times = &trajs[0].times;
        let sol: Vec<&[f64]> =
            trajs.iter().map(|t| t.solution_error.as_deref().expect("Kepler has an exact flow")).collect();
        let energy: Vec<&[f64]> = trajs.iter().map(|t| t.energy_error.as_slice()).collect();
        for (kind, columns) in [("solution", &sol), ("energy", &energy)] {
            let cols: Vec<(&str, &[f64])> = names.iter().map(String::as_str).zip(columns.iter().copied()).collect();
            let file = format!("kepler_{kind}_error_order{order}.csv");
            write_file(&dir.join(&file), series_csv(times, &cols).as_bytes())?;
            files.push(file);
        }
    }
    Ok(TargetSummary::new("kepler", checks, metrics, files))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_layout() {
        let csv = series_csv(&[0.0, 0.1], &[("a", &[1.0, 2.0]), ("b", &[0.5, -0.25])]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,a,b");
        assert_eq!(lines[2], "1.0000000000000001e-1,2.0000000000000000e0,-2.5000000000000000e-1");
    }

    #[test]
    fn summary_lists_failures() {
        let bad = TargetSummary::new(
            "x",
            vec![Check::new("ok", 0.0, 1.0), Check::new("big", 2.0, 1.0)],
            BTreeMap::new(),
            vec![],
        );
        assert!(!bad.pass);
        assert_eq!(bad.max_deviation, 2.0);
        let err = Summary { pass: false, targets: vec![bad] }.into_result().unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("x: big"));
    }

    #[test]
    fn example_targets_pass() {
        let dir = std::env::temp_dir().join(format!("jacobi-srk-unit-{}", std::process::id()));
        let summary = run(Target::Ex3, &dir).unwrap();
        assert!(summary.pass && summary.targets[0].max_deviation <= ALPHA_TOL);
        fs::remove_dir_all(&dir).unwrap();
    }
}
