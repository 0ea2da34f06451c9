//! Matrix form of the replicator dynamics.
//!
//! The population is carried by the symmetric matrix `X` with entries
//! `x_ij = sqrt(x_i x_j)`, which evolves under the commutator flow
//! `dX/dt = [Λ, X]` with `Λ = [Q, X]` and `Q = diag(f_i / 2)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, PayoffMatrix};
use crate::linalg::{commutator, max_abs};
use crate::ode::{self, IntegratorConfig, Method};
use crate::replicator::Trajectory;

/// Components below this are clamped to zero before taking square roots.
pub const SQRT_CLAMP: f64 = 1e-15;

/// The relative-frequency matrix `x_ij = sqrt(x_i x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqMatrix(DMatrix<f64>);

impl FreqMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn diagonal(&self) -> DVector<f64> {
        self.0.diagonal()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `max |(X² - X)_ij|`.
    pub fn idempotency_defect(&self) -> f64 {
        idempotency_defect(&self.0)
    }

    /// `max |X_ij - X_ji|`.
    pub fn asymmetry(&self) -> f64 {
        max_abs(&(&self.0 - self.0.transpose()))
    }
}

/// The antisymmetric generator `Λ` of the commutator flow.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMatrix(DMatrix<f64>);

impl LambdaMatrix {
    /// Wraps a matrix after checking `Λᵀ = -Λ` within `1e-12`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid("lambda matrix", "must be square"));
        }
        let defect = max_abs(&(&m + m.transpose()));
        if defect > 1e-12 {
            return Err(Error::invalid(
                "lambda matrix",
                format!("not antisymmetric: max |Λ + Λᵀ| = {defect:e}"),
            ));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

pub(crate) fn idempotency_defect(x: &DMatrix<f64>) -> f64 {
    max_abs(&(x * x - x))
}

pub(crate) fn sqrt_outer(x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| {
        if x[i] < SQRT_CLAMP || x[j] < SQRT_CLAMP {
            0.0
        } else {
            (x[i] * x[j]).sqrt()
        }
    })
}

pub fn freq_matrix(x: &MixedStrategy) -> FreqMatrix {
    let mut m = sqrt_outer(x.as_vector());
    // Keep the diagonal exactly equal to x rather than sqrt(x)².
    for (i, &xi) in x.as_slice().iter().enumerate() {
        m[(i, i)] = xi;
    }
    FreqMatrix(m)
}

/// `(G+Gᵀ)_ij = ½ f_i x_ij + ½ f_j x_ji - <f> x_ij`, the matrix-form field.
pub fn g_sym(x: &MixedStrategy, a: &PayoffMatrix) -> Result<DMatrix<f64>> {
    Error::check_dim("g_sym", a.dim(), x.len())?;
    let xm = freq_matrix(x).0;
    let f = a.matrix() * x.as_vector();
    let mean = x.as_vector().dot(&f);
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        0.5 * f[i] * xm[(i, j)] + 0.5 * f[j] * xm[(j, i)] - mean * xm[(i, j)]
    }))
}

/// `Q = diag(½ Σ_k a_ik x_k)`.
pub fn q_matrix(x: &MixedStrategy, a: &PayoffMatrix) -> Result<DMatrix<f64>> {
    Error::check_dim("q_matrix", a.dim(), x.len())?;
    let f = a.matrix() * x.as_vector();
    Ok(DMatrix::from_diagonal(&(f * 0.5)))
}

/// `Λ_ij = ½ (f_i x_ij - x_ji f_j)` for fitness `f = A diag(X)`.
pub(crate) fn lambda_from_matrix(xm: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let f = a * xm.diagonal();
    let n = xm.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (f[i] * xm[(i, j)] - xm[(j, i)] * f[j]))
}

pub fn lambda_matrix(x: &MixedStrategy, a: &PayoffMatrix) -> Result<LambdaMatrix> {
    Error::check_dim("lambda_matrix", a.dim(), x.len())?;
    let xm = freq_matrix(x).0;
    Ok(LambdaMatrix(lambda_from_matrix(&xm, a.matrix())))
}

/// The Lax field `[Λ, X]` evaluated on an arbitrary matrix state.
pub(crate) fn lax_rhs_matrix(xm: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let lambda = lambda_from_matrix(xm, a);
    commutator(&lambda, xm)
}

/// `[Λ, X]` at the frequency matrix of `x`.
pub fn lax_rhs(x: &MixedStrategy, a: &PayoffMatrix) -> Result<DMatrix<f64>> {
    Error::check_dim("lax_rhs", a.dim(), x.len())?;
    Ok(lax_rhs_matrix(&freq_matrix(x).0, a.matrix()))
}

/// Matrix trajectory with the per-sample invariant drift of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTrajectory {
    pub times: Vec<f64>,
    pub matrices: Vec<DMatrix<f64>>,
    /// `|Tr X - 1|` per sample.
    pub trace_drift: Vec<f64>,
    /// `max |(X² - X)_ij|` per sample.
    pub idempotency_drift: Vec<f64>,
    pub method: Method,
    pub dt: f64,
}

impl MatrixTrajectory {
    pub fn diagonals(&self) -> impl Iterator<Item = DVector<f64>> + '_ {
        self.matrices.iter().map(|m| m.diagonal())
    }

    pub fn final_matrix(&self) -> &DMatrix<f64> {
        self.matrices.last().expect("trajectory holds the initial matrix")
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.trace_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_idempotency_drift(&self) -> f64 {
        self.idempotency_drift.iter().copied().fold(0.0, f64::max)
    }
}

/// Integrates `dX/dt = [Λ, X]` directly in matrix space starting from
/// `freq_matrix(x0)`. No projection back onto rank-one projectors is
/// applied; `cfg.renormalize` is ignored and the drift is recorded instead.
pub fn integrate_matrix(
    x0: &MixedStrategy,
    a: &PayoffMatrix,
    cfg: &IntegratorConfig,
) -> Result<MatrixTrajectory> {
    Error::check_dim("integrate_matrix", a.dim(), x0.len())?;
    cfg.validate()?;
    let steps = cfg.steps();
    let am = a.matrix();
    let mut rhs = |xm: &DMatrix<f64>| lax_rhs_matrix(xm, am);

    let mut out = MatrixTrajectory {
        times: Vec::with_capacity(steps + 1),
        matrices: Vec::with_capacity(steps + 1),
        trace_drift: Vec::with_capacity(steps + 1),
        idempotency_drift: Vec::with_capacity(steps + 1),
        method: cfg.method,
        dt: cfg.dt,
    };
    let record = |t: f64, xm: &DMatrix<f64>, out: &mut MatrixTrajectory| {
        out.times.push(t);
        out.trace_drift.push((xm.trace() - 1.0).abs());
        out.idempotency_drift.push(idempotency_defect(xm));
        out.matrices.push(xm.clone());
    };

    let mut xm = freq_matrix(x0).0;
    record(0.0, &xm, &mut out);
    for k in 1..=steps {
        let t = cfg.time(k);
        xm = ode::step(cfg.method, &xm, cfg.dt, &mut rhs);
        if !xm.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { time: t });
        }
        record(t, &xm, &mut out);
    }
    Ok(out)
}

/// Frequency matrices rebuilt from a vector trajectory, for comparison with
/// [`integrate_matrix`].
pub fn freq_series(traj: &Trajectory) -> Vec<FreqMatrix> {
    traj.states
        .iter()
        .map(|x| {
            let mut m = sqrt_outer(x);
            m.set_diagonal(x);
            FreqMatrix(m)
        })
        .collect()
}
