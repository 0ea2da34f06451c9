//! Python module `egtq`. Vectors are lists of floats, matrices are lists of
//! rows; density matrices may hold Python `complex` entries.

use egtq::nalgebra::DMatrix;
use egtq::{CMatrix, Complex64, Error, IdentityOutcome, Method};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonFinite { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rows_of<T: Copy + egtq::nalgebra::Scalar>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn cmatrix(rows: &[Vec<Complex64>]) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn strategy(x: Vec<f64>) -> PyResult<egtq::MixedStrategy> {
    egtq::MixedStrategy::new(x).map_err(to_py)
}

fn config(dt: f64, t_end: f64, method: &str, renormalize: bool) -> PyResult<egtq::IntegratorConfig> {
    let method: Method = method.parse().map_err(to_py)?;
    Ok(egtq::IntegratorConfig::new(method, dt, t_end).map_err(to_py)?.with_renormalize(renormalize))
}

#[pyclass(frozen, get_all, module = "egtq")]
pub struct EquilibriumReport {
    verdict: String,
    worst_deviation: f64,
    /// `(strategy index, kind, margin)` triples.
    witnesses: Vec<(usize, String, f64)>,
}

impl From<egtq::EquilibriumReport> for EquilibriumReport {
    fn from(r: egtq::EquilibriumReport) -> Self {
        Self {
            verdict: r.verdict.as_str().into(),
            worst_deviation: r.worst_deviation,
            witnesses: r
                .witnesses
                .iter()
                .map(|w| {
                    let kind = match w.kind {
                        egtq::WitnessKind::BetterReply => "better-reply",
                        egtq::WitnessKind::Tie => "tie",
                        egtq::WitnessKind::Invader => "invader",
                    };
                    (w.strategy, kind.to_string(), w.margin)
                })
                .collect(),
        }
    }
}

#[pymethods]
impl EquilibriumReport {
    fn __repr__(&self) -> String {
        format!("EquilibriumReport(verdict={:?}, worst_deviation={})", self.verdict, self.worst_deviation)
    }
}

#[pyclass(frozen, get_all, module = "egtq")]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    max_simplex_drift: f64,
}

#[pyclass(frozen, get_all, module = "egtq")]
pub struct MatrixTrajectory {
    times: Vec<f64>,
    diagonals: Vec<Vec<f64>>,
    trace_drift: Vec<f64>,
    idempotency_drift: Vec<f64>,
}

#[pyclass(frozen, get_all, module = "egtq")]
pub struct DensityTrajectory {
    times: Vec<f64>,
    populations: Vec<Vec<f64>>,
    purity: Vec<f64>,
    trace_drift: Vec<f64>,
    final_state: Vec<Vec<Complex64>>,
}

#[pyclass(frozen, get_all, module = "egtq")]
pub struct FixedPoint {
    strategy: Vec<f64>,
    support: Vec<usize>,
    verdict: String,
    stable: bool,
    eigenvalues: Vec<Complex64>,
}

/// A symmetric two-player game given by its row player's payoff matrix.
#[pyclass(frozen, module = "egtq")]
pub struct Game(egtq::PayoffMatrix);

#[pymethods]
impl Game {
    #[new]
    fn new(payoff: Vec<Vec<f64>>) -> PyResult<Self> {
        egtq::PayoffMatrix::from_rows(&payoff).map(Game).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn payoff(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    fn expected_payoff(&self, p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
        egtq::expected_payoff(&strategy(p)?, &strategy(q)?, &self.0).map_err(to_py)
    }

    fn fitness(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(egtq::fitness(&strategy(x)?, &self.0).map_err(to_py)?.iter().copied().collect())
    }

    fn average_fitness(&self, x: Vec<f64>) -> PyResult<f64> {
        egtq::average_fitness(&strategy(x)?, &self.0).map_err(to_py)
    }

    #[pyo3(signature = (p, tol = egtq::DEFAULT_TOL))]
    fn certify_nash(&self, p: Vec<f64>, tol: f64) -> PyResult<EquilibriumReport> {
        Ok(egtq::certify_nash(&strategy(p)?, &self.0, tol).map_err(to_py)?.into())
    }

    #[pyo3(signature = (p, tol = egtq::DEFAULT_TOL))]
    fn certify_ess(&self, p: Vec<f64>, tol: f64) -> PyResult<EquilibriumReport> {
        Ok(egtq::certify_ess(&strategy(p)?, &self.0, tol).map_err(to_py)?.into())
    }

    fn replicator_rhs(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(egtq::replicator_rhs(&strategy(x)?, &self.0).map_err(to_py)?.iter().copied().collect())
    }

    fn shannon_rate(&self, x: Vec<f64>) -> PyResult<f64> {
        egtq::shannon_rate(&strategy(x)?, &self.0).map_err(to_py)
    }

    #[pyo3(signature = (x0, dt, t_end, method = "rk4", renormalize = true))]
    fn integrate(&self, x0: Vec<f64>, dt: f64, t_end: f64, method: &str, renormalize: bool) -> PyResult<Trajectory> {
        let t = egtq::integrate(&strategy(x0)?, &self.0, &config(dt, t_end, method, renormalize)?).map_err(to_py)?;
        Ok(Trajectory {
            max_simplex_drift: t.meta.max_simplex_drift,
            states: t.states.iter().map(|x| x.iter().copied().collect()).collect(),
            times: t.times,
        })
    }

    #[pyo3(signature = (tol = egtq::DEFAULT_TOL))]
    fn fixed_points(&self, tol: f64) -> PyResult<Vec<FixedPoint>> {
        let scan = egtq::find_fixed_points(&self.0, tol).map_err(to_py)?;
        Ok(scan
            .points
            .into_iter()
            .map(|p| FixedPoint {
                strategy: p.strategy.to_vec(),
                support: p.support,
                verdict: p.verdict.as_str().into(),
                stable: p.stable,
                eigenvalues: p.eigenvalues,
            })
            .collect())
    }

    fn lambda_matrix(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows_of(egtq::lambda_matrix(&strategy(x)?, &self.0).map_err(to_py)?.matrix()))
    }

    fn lax_rhs(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows_of(&egtq::lax_rhs(&strategy(x)?, &self.0).map_err(to_py)?))
    }

    #[pyo3(signature = (x0, dt, t_end, method = "rk4"))]
    fn integrate_matrix(&self, x0: Vec<f64>, dt: f64, t_end: f64, method: &str) -> PyResult<MatrixTrajectory> {
        let t = egtq::integrate_matrix(&strategy(x0)?, &self.0, &config(dt, t_end, method, false)?).map_err(to_py)?;
        Ok(MatrixTrajectory {
            diagonals: t.diagonals().map(|d| d.iter().copied().collect()).collect(),
            times: t.times,
            trace_drift: t.trace_drift,
            idempotency_drift: t.idempotency_drift,
        })
    }

    /// Von Neumann evolution of `quantize(x0)` under `H = iħΛ(diag ρ)`.
    #[pyo3(signature = (x0, dt, t_end, hbar = 1.0, method = "rk4"))]
    fn evolve_quantum(&self, x0: Vec<f64>, dt: f64, t_end: f64, hbar: f64, method: &str) -> PyResult<DensityTrajectory> {
        let source = egtq::HamiltonianSource::SelfConsistent { payoff: self.0.clone(), hbar };
        let cfg = config(dt, t_end, method, false)?;
        let t = egtq::evolve(&egtq::quantize(&strategy(x0)?), &source, &cfg).map_err(to_py)?;
        Ok(DensityTrajectory {
            populations: (0..t.states.len()).map(|k| t.populations(k).iter().copied().collect()).collect(),
            purity: t.drift.iter().map(|d| d.purity).collect(),
            trace_drift: t.drift.iter().map(|d| d.trace).collect(),
            final_state: rows_of(t.final_state()),
            times: t.times,
        })
    }

    fn __repr__(&self) -> String {
        format!("Game({:?})", self.0.rows())
    }
}

#[pyclass(frozen, get_all, module = "egtq")]
pub struct ThermoState {
    beta: f64,
    tau: f64,
    partition: f64,
    log_partition: f64,
    mean_energy: f64,
    entropy: f64,
    energy_variance: f64,
    populations: Vec<f64>,
}

/// Discrete energy levels.
#[pyclass(frozen, module = "egtq")]
pub struct Spectrum(egtq::EnergySpectrum);

#[pymethods]
impl Spectrum {
    #[new]
    fn new(levels: Vec<f64>) -> PyResult<Self> {
        egtq::EnergySpectrum::new(levels).map(Spectrum).map_err(to_py)
    }

    #[getter]
    fn levels(&self) -> Vec<f64> {
        self.0.levels().to_vec()
    }

    fn gibbs(&self, beta: f64) -> PyResult<Vec<f64>> {
        egtq::gibbs_distribution(&self.0, beta).map_err(to_py)
    }

    fn thermo(&self, beta: f64) -> PyResult<ThermoState> {
        let s = egtq::thermo_state(&self.0, beta).map_err(to_py)?;
        Ok(ThermoState {
            beta: s.beta,
            tau: s.tau,
            partition: s.partition,
            log_partition: s.log_partition,
            mean_energy: s.mean_energy,
            entropy: s.entropy,
            energy_variance: s.energy_variance,
            populations: s.populations,
        })
    }

    fn solve_beta(&self, target_energy: f64) -> PyResult<f64> {
        egtq::solve_beta(&self.0, target_energy).map_err(to_py)
    }

    /// `(label, analytic, finite_difference, relative_error)` per identity;
    /// the three numbers are `None` where the identity is undefined.
    #[pyo3(signature = (beta, h = 1e-4))]
    fn verify_identities(&self, beta: f64, h: f64) -> PyResult<Vec<(String, Option<f64>, Option<f64>, Option<f64>)>> {
        let report = egtq::verify_identities(&self.0, beta, h).map_err(to_py)?;
        Ok(report
            .checks
            .iter()
            .map(|c| match c.outcome {
                IdentityOutcome::Checked { analytic, finite_difference, relative_error } => {
                    (c.identity.label().to_string(), Some(analytic), Some(finite_difference), Some(relative_error))
                }
                IdentityOutcome::Undefined(_) => (c.identity.label().to_string(), None, None, None),
            })
            .collect())
    }
}

#[pyfunction]
fn freq_matrix(x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows_of(egtq::freq_matrix(&strategy(x)?).matrix()))
}

#[pyfunction]
fn quantize(x: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(rows_of(egtq::quantize(&strategy(x)?).matrix()))
}

#[pyfunction]
fn von_neumann_entropy(rho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let rho = egtq::DensityOperator::new(cmatrix(&rho)?).map_err(to_py)?;
    Ok(egtq::von_neumann_entropy(&rho))
}

#[pyfunction]
fn vn_entropy_rate_series(rho: Vec<Vec<Complex64>>, drho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    egtq::vn_entropy_rate_series(&cmatrix(&rho)?, &cmatrix(&drho)?).map_err(to_py)
}

#[pyfunction]
fn exact_entropy_rate(rho: Vec<Vec<Complex64>>, drho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    egtq::exact_entropy_rate(&cmatrix(&rho)?, &cmatrix(&drho)?).map_err(to_py)
}

#[pyfunction]
fn shannon_entropy(x: Vec<f64>) -> PyResult<f64> {
    egtq::shannon_entropy(&x).map_err(to_py)
}

fn joint(p: Vec<Vec<f64>>) -> PyResult<egtq::JointDistribution> {
    egtq::JointDistribution::from_rows(&p).map_err(to_py)
}

#[pyfunction]
fn joint_entropy(p: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(egtq::joint_entropy(&joint(p)?))
}

#[pyfunction]
fn conditional_entropy(p: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(egtq::conditional_entropy(&joint(p)?))
}

#[pyfunction]
fn mutual_information(p: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(egtq::mutual_information(&joint(p)?))
}

#[pyfunction]
fn relative_entropy(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    egtq::relative_entropy(&p, &q).map_err(to_py)
}

#[pyfunction]
fn sanov_confusion_bound(p: Vec<f64>, q: Vec<f64>, repetitions: u64) -> PyResult<f64> {
    egtq::sanov_confusion_bound(&p, &q, repetitions).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "egtq")]
fn egtq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_TOL", egtq::DEFAULT_TOL)?;
    m.add_class::<Game>()?;
    m.add_class::<Spectrum>()?;
    m.add_class::<EquilibriumReport>()?;
    m.add_class::<Trajectory>()?;
    m.add_class::<MatrixTrajectory>()?;
    m.add_class::<DensityTrajectory>()?;
    m.add_class::<FixedPoint>()?;
    m.add_class::<ThermoState>()?;
    m.add_function(wrap_pyfunction!(freq_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(vn_entropy_rate_series, m)?)?;
    m.add_function(wrap_pyfunction!(exact_entropy_rate, m)?)?;
    m.add_function(wrap_pyfunction!(shannon_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(joint_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(relative_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(sanov_confusion_bound, m)?)?;
    Ok(())
}
