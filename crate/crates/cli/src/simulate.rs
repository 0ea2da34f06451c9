//! `simulate`: runs the analyses of a scenario and writes their series.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use egtq::lax::{freq_matrix, integrate_matrix};
use egtq::nalgebra::DVector;
use egtq::{
    certify_ess, evolve, exact_entropy_rate, find_fixed_points, integrate, quantize,
    shannon_entropy, shannon_rate, spectral_entropy, vn_entropy_rate_series, Complex64,
    HamiltonianSource, MixedStrategy, Trajectory, DEFAULT_TOL,
};
use serde::Serialize;
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::output::{drift_json, Cell, DriftSummary, Table};
use crate::scenario::{Analysis, Scenario, Tolerances};

/// Overrides `output.dir` of every scenario.
pub const OUTPUT_DIR_ENV: &str = "EGTQ_OUTPUT_DIR";

pub struct AnalysisResult {
    pub analysis: Analysis,
    pub table: Table,
    pub drift: DriftSummary,
    /// Tolerances that were exceeded, by drift name.
    pub violations: Vec<String>,
}

#[derive(Serialize)]
struct ManifestEntry {
    name: &'static str,
    files: Vec<String>,
    status: &'static str,
    drift: BTreeMap<&'static str, Box<RawValue>>,
    violations: Vec<String>,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    scenario_sha256: String,
    format: &'static str,
    analyses: Vec<ManifestEntry>,
    passed: bool,
}

pub struct RunSummary {
    pub dir: PathBuf,
    pub passed: bool,
    pub violations: Vec<String>,
}

pub fn output_dir(scenario: &Scenario, scenario_path: &Path) -> PathBuf {
    let configured = std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(&scenario.file.output.dir));
    if configured.is_absolute() {
        configured
    } else {
        scenario_path.parent().unwrap_or(Path::new(".")).join(configured)
    }
}

pub fn run(scenario_path: &Path) -> Result<RunSummary, CliError> {
    let text = crate::scenario::read_file(scenario_path)?;
    let scenario = Scenario::parse(&text)?;
    let results = run_analyses(&scenario)?;

    let dir = output_dir(&scenario, scenario_path);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let format = scenario.file.output.format;
    let mut entries = Vec::new();
    let mut violations = Vec::new();
    for r in &results {
        let file = format!("{}.{}", r.analysis.name(), format.extension());
        let path = dir.join(&file);
        std::fs::write(&path, r.table.render(format))
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
        violations.extend(r.violations.iter().map(|v| format!("{}: {v}", r.analysis)));
        entries.push(ManifestEntry {
            name: r.analysis.name(),
            files: vec![file],
            status: if r.violations.is_empty() { "ok" } else { "tolerance-exceeded" },
            drift: drift_json(&r.drift),
            violations: r.violations.clone(),
        });
    }
    let manifest = Manifest {
        tool: "egtq",
        version: env!("CARGO_PKG_VERSION"),
        scenario_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        format: format.extension(),
        analyses: entries,
        passed: violations.is_empty(),
    };
    let path = dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    std::fs::write(&path, json).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    Ok(RunSummary {
        dir,
        passed: violations.is_empty(),
        violations,
    })
}

/// Runs every requested analysis. They share only the scenario and the
/// reference vector trajectory, so they run on separate threads.
pub fn run_analyses(scenario: &Scenario) -> Result<Vec<AnalysisResult>, CliError> {
    let needs_vector = scenario.analyses.iter().any(|a| *a != Analysis::Equilibria);
    let vector = if needs_vector {
        let first = scenario.analyses[0];
        Some(integrate(&scenario.initial, &scenario.game, &scenario.integrator).map_err(|e| CliError::numerical(first.name(), e))?)
    } else {
        None
    };
    let vector = vector.as_ref();
    std::thread::scope(|s| {
        let handles: Vec<_> = scenario
            .analyses
            .iter()
            .map(|&a| s.spawn(move || run_one(a, scenario, vector)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("analysis thread panicked")).collect()
    })
}

fn run_one(analysis: Analysis, scenario: &Scenario, vector: Option<&Trajectory>) -> Result<AnalysisResult, CliError> {
    let tol = &scenario.file.tolerances;
    let (table, drift) = match analysis {
        Analysis::Vector => vector_series(vector.expect("vector trajectory")),
        Analysis::Lax => lax_series(scenario, vector.expect("vector trajectory"))?,
        Analysis::QuantumSelfConsistent => quantum_series(scenario, vector.expect("vector trajectory"))?,
        Analysis::EntropySeries => entropy_series(scenario, vector.expect("vector trajectory")),
        Analysis::Equilibria => equilibria(scenario)?,
    };
    let violations = check(&drift, tol);
    Ok(AnalysisResult {
        analysis,
        table,
        drift,
        violations,
    })
}

fn check(drift: &DriftSummary, tol: &Tolerances) -> Vec<String> {
    let mut out = Vec::new();
    for (&name, &value) in drift {
        let bound = match name {
            "max_simplex_drift" => tol.simplex,
            "max_trace_drift" => tol.trace,
            "max_idempotency_drift" => tol.idempotency,
            "max_hermiticity_drift" => tol.hermiticity,
            "max_purity_drift" => tol.purity,
            "max_vector_discrepancy" => tol.discrepancy,
            _ => continue,
        };
        if !(value <= bound) {
            out.push(format!("{name} = {value:e} exceeds {bound:e}"));
        }
    }
    out
}

fn x_columns(n: usize) -> impl Iterator<Item = String> {
    (1..=n).map(|i| format!("x_{i}"))
}

fn vector_series(traj: &Trajectory) -> (Table, DriftSummary) {
    let n = traj.states[0].len();
    let mut table = Table::new(std::iter::once("t".to_string()).chain(x_columns(n)));
    for (t, x) in traj.times.iter().zip(&traj.states) {
        table.push(std::iter::once(Cell::Num(*t)).chain(x.iter().map(|&v| Cell::Num(v))).collect());
    }
    let drift = DriftSummary::from([("max_simplex_drift", traj.meta.max_simplex_drift)]);
    (table, drift)
}

fn lax_series(scenario: &Scenario, vector: &Trajectory) -> Result<(Table, DriftSummary), CliError> {
    let traj = integrate_matrix(&scenario.initial, &scenario.game, &scenario.integrator)
        .map_err(|e| CliError::numerical("lax", e))?;
    let n = scenario.game.dim();
    let columns = std::iter::once("t".to_string())
        .chain(x_columns(n))
        .chain(["trace_drift".to_string(), "idempotency_drift".to_string()]);
    let mut table = Table::new(columns);
    let mut discrepancy = 0.0f64;
    let mut asymmetry = 0.0f64;
    for k in 0..traj.times.len() {
        let m = &traj.matrices[k];
        let diag = m.diagonal();
        discrepancy = discrepancy.max((&diag - &vector.states[k]).amax());
        asymmetry = asymmetry.max((m - m.transpose()).amax());
        let mut row = vec![Cell::Num(traj.times[k])];
        row.extend(diag.iter().map(|&v| Cell::Num(v)));
        row.push(traj.trace_drift[k].into());
        row.push(traj.idempotency_drift[k].into());
        table.push(row);
    }
    let drift = DriftSummary::from([
        ("max_trace_drift", traj.max_trace_drift()),
        ("max_idempotency_drift", traj.max_idempotency_drift()),
        ("max_hermiticity_drift", asymmetry),
        ("max_vector_discrepancy", discrepancy),
    ]);
    Ok((table, drift))
}

fn quantum_series(scenario: &Scenario, vector: &Trajectory) -> Result<(Table, DriftSummary), CliError> {
    let source = HamiltonianSource::SelfConsistent {
        payoff: scenario.game.clone(),
        hbar: scenario.file.hbar,
    };
    let traj = evolve(&quantize(&scenario.initial), &source, &scenario.integrator)
        .map_err(|e| CliError::numerical("quantum-self-consistent", e))?;
    let mut table = Table::new(["t", "S_vn", "series_rate", "exact_rate"]);
    let mut discrepancy = 0.0f64;
    for (k, (t, rho)) in traj.times.iter().zip(&traj.states).enumerate() {
        let drho = source.rhs(*t, rho);
        let s = spectral_entropy(rho).unwrap_or(f64::NAN);
        let series = vn_entropy_rate_series(rho, &drho).unwrap_or(f64::NAN);
        let exact = exact_entropy_rate(rho, &drho).unwrap_or(f64::NAN);
        table.push(vec![(*t).into(), s.into(), series.into(), exact.into()]);
        discrepancy = discrepancy.max(reference_gap(rho, &vector.states[k]));
    }
    let fold = |f: fn(&egtq::quantum::DensityDrift) -> f64| traj.drift.iter().map(f).fold(0.0, f64::max);
    let drift = DriftSummary::from([
        ("max_trace_drift", fold(|d| d.trace)),
        ("max_hermiticity_drift", fold(|d| d.hermiticity)),
        ("max_purity_drift", fold(|d| (d.purity - 1.0).abs())),
        ("min_eigenvalue", traj.drift.iter().map(|d| d.min_eigenvalue).fold(f64::INFINITY, f64::min)),
        ("max_vector_discrepancy", discrepancy),
    ]);
    Ok((table, drift))
}

/// Entrywise gap between ρ and the frequency matrix of the vector state.
fn reference_gap(rho: &egtq::CMatrix, x: &DVector<f64>) -> f64 {
    let Ok(x) = MixedStrategy::new(x.as_slice().to_vec()) else {
        return f64::NAN;
    };
    let expect = freq_matrix(&x);
    rho.iter()
        .zip(expect.matrix().iter())
        .map(|(z, &v)| (z - Complex64::new(v, 0.0)).norm())
        .fold(0.0, f64::max)
}

fn entropy_series(scenario: &Scenario, vector: &Trajectory) -> (Table, DriftSummary) {
    let mut table = Table::new(["t", "H", "dH_formula"]);
    let mut boundary_rows = 0usize;
    for (k, t) in vector.times.iter().enumerate() {
        let x = &vector.states[k];
        let h = shannon_entropy(x.as_slice()).unwrap_or(f64::NAN);
        // The rate is undefined on the simplex boundary; those rows hold NaN.
        let rate = vector
            .strategy(k)
            .and_then(|s| shannon_rate(&s, &scenario.game))
            .unwrap_or_else(|_| {
                boundary_rows += 1;
                f64::NAN
            });
        table.push(vec![(*t).into(), h.into(), rate.into()]);
    }
    let drift = DriftSummary::from([
        ("max_simplex_drift", vector.meta.max_simplex_drift),
        ("undefined_rate_rows", boundary_rows as f64),
    ]);
    (table, drift)
}

fn equilibria(scenario: &Scenario) -> Result<(Table, DriftSummary), CliError> {
    let scan = find_fixed_points(&scenario.game, DEFAULT_TOL).map_err(|e| CliError::numerical("equilibria", e))?;
    let n = scenario.game.dim();
    let columns = x_columns(n)
        .chain(["support", "verdict", "ess_verdict", "stable", "max_real_eigenvalue"].map(String::from));
    let mut table = Table::new(columns);
    for fp in &scan.points {
        let ess = certify_ess(&fp.strategy, &scenario.game, DEFAULT_TOL)
            .map_err(|e| CliError::numerical("equilibria", e))?;
        let support: Vec<String> = fp.support.iter().map(|i| (i + 1).to_string()).collect();
        let max_re = fp.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let mut row: Vec<Cell> = fp.strategy.as_slice().iter().map(|&v| Cell::Num(v)).collect();
        row.push(Cell::Text(support.join(";")));
        row.push(Cell::Text(fp.verdict.as_str().into()));
        row.push(Cell::Text(ess.verdict.as_str().into()));
        row.push(Cell::Text(fp.stable.to_string()));
        row.push(Cell::Num(if fp.eigenvalues.is_empty() { f64::NAN } else { max_re }));
        table.push(row);
    }
    let drift = DriftSummary::from([
        ("rest_points", scan.points.len() as f64),
        ("singular_supports", scan.singular_supports.len() as f64),
    ]);
    Ok((table, drift))
}
