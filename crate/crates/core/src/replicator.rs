//! Vector-form replicator dynamics `dx_i/dt = (f_i(x) - <f(x)>) x_i`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{certify_nash, MixedStrategy, PayoffMatrix, Verdict, DEFAULT_TOL};
use crate::ode::{self, IntegratorConfig, Method};

/// Components below this are treated as sitting on the simplex boundary.
pub const BOUNDARY_EPS: f64 = 1e-15;

/// Largest strategy count accepted by [`find_fixed_points`].
pub const MAX_SUPPORT_ENUMERATION: usize = 4;

/// Replicator field on a raw frequency vector (no simplex validation).
pub(crate) fn rhs_raw(x: &DVector<f64>, a: &DMatrix<f64>) -> DVector<f64> {
    let f = a * x;
    let mean = x.dot(&f);
    DVector::from_fn(x.len(), |i, _| (f[i] - mean) * x[i])
}

pub fn replicator_rhs(x: &MixedStrategy, a: &PayoffMatrix) -> Result<DVector<f64>> {
    Error::check_dim("replicator_rhs", a.dim(), x.len())?;
    Ok(rhs_raw(x.as_vector(), a.matrix()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub method: Method,
    pub dt: f64,
    pub payoff_fingerprint: u64,
    pub renormalized: bool,
    /// Largest `|Σ x_i - 1|` seen right after a step, before any projection.
    pub max_simplex_drift: f64,
}

/// Sampled solution of the vector replicator equation, one state per
/// accepted step including the initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// State `k` as a validated strategy.
    pub fn strategy(&self, k: usize) -> Result<MixedStrategy> {
        MixedStrategy::new(self.states[k].iter().copied().collect::<Vec<_>>())
    }
}

pub fn integrate(x0: &MixedStrategy, a: &PayoffMatrix, cfg: &IntegratorConfig) -> Result<Trajectory> {
    Error::check_dim("integrate", a.dim(), x0.len())?;
    cfg.validate()?;
    let steps = cfg.steps();
    let m = a.matrix();
    let mut rhs = |x: &DVector<f64>| rhs_raw(x, m);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.as_vector().clone();
    let mut max_drift = 0.0f64;
    times.push(0.0);
    states.push(x.clone());
    for k in 1..=steps {
        let t = cfg.time(k);
        x = ode::step(cfg.method, &x, cfg.dt, &mut rhs);
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { time: t });
        }
        let sum = x.sum();
        max_drift = max_drift.max((sum - 1.0).abs());
        if cfg.renormalize {
            x /= sum;
        }
        times.push(t);
        states.push(x.clone());
    }
    Ok(Trajectory {
        times,
        states,
        meta: TrajectoryMeta {
            method: cfg.method,
            dt: cfg.dt,
            payoff_fingerprint: a.fingerprint(),
            renormalized: cfg.renormalize,
            max_simplex_drift: max_drift,
        },
    })
}

/// Jacobian of the replicator field at `x`:
/// `J_ij = δ_ij (f_i - <f>) + x_i (a_ij - (Aᵀx)_j - (Ax)_j)`.
pub fn jacobian(x: &MixedStrategy, a: &PayoffMatrix) -> Result<DMatrix<f64>> {
    Error::check_dim("jacobian", a.dim(), x.len())?;
    let m = a.matrix();
    let xv = x.as_vector();
    let f = m * xv;
    let g = m.transpose() * xv;
    let mean = xv.dot(&f);
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { f[i] - mean } else { 0.0 };
        diag + xv[i] * (m[(i, j)] - g[j] - f[j])
    }))
}

/// Orthonormal basis (as columns) of the simplex tangent space `Σ v_i = 0`.
fn tangent_basis(n: usize) -> DMatrix<f64> {
    let spanning = DMatrix::from_fn(n, n - 1, |i, j| {
        if i == j {
            1.0
        } else if i == n - 1 {
            -1.0
        } else {
            0.0
        }
    });
    spanning.qr().q()
}

/// Eigenvalues of the Jacobian restricted to the simplex tangent space.
pub fn transversal_eigenvalues(x: &MixedStrategy, a: &PayoffMatrix) -> Result<Vec<Complex<f64>>> {
    let n = x.len();
    if n < 2 {
        Error::check_dim("transversal_eigenvalues", a.dim(), n)?;
        return Ok(Vec::new());
    }
    let j = jacobian(x, a)?;
    let b = tangent_basis(n);
    let reduced = b.transpose() * j * &b;
    Ok(reduced.complex_eigenvalues().iter().copied().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub strategy: MixedStrategy,
    pub support: Vec<usize>,
    pub verdict: Verdict,
    pub eigenvalues: Vec<Complex<f64>>,
    /// Every transversal eigenvalue has a strictly negative real part.
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixedPointScan {
    pub points: Vec<FixedPoint>,
    /// Supports whose equal-fitness system was singular.
    pub singular_supports: Vec<Vec<usize>>,
}

/// Enumerates rest points by support: on each support `S` solve
/// `Σ_{j∈S} a_ij x_j = v` for `i ∈ S` together with `Σ_{j∈S} x_j = 1`.
///
/// Solutions with every support weight above `tol` and a replicator field of
/// norm at most `tol` are kept and labelled with their Nash verdict (at the
/// default certification tolerance) and linear stability.
pub fn find_fixed_points(a: &PayoffMatrix, tol: f64) -> Result<FixedPointScan> {
    let n = a.dim();
    if n > MAX_SUPPORT_ENUMERATION {
        return Err(Error::invalid(
            "fixed point search",
            format!("support enumeration is limited to n <= {MAX_SUPPORT_ENUMERATION}, got n = {n}"),
        ));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::invalid("tolerance", format!("{tol} must be finite and >= 0")));
    }
    let m = a.matrix();
    let mut scan = FixedPointScan::default();
    for mask in 1u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = support.len();
        let mut system = DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                system[(r, c)] = m[(i, j)];
            }
            system[(r, k)] = -1.0;
            system[(k, r)] = 1.0;
        }
        rhs[k] = 1.0;

        let sv = system.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        if smax == 0.0 || smin / smax < 1e-12 {
            scan.singular_supports.push(support);
            continue;
        }
        let Some(sol) = system.lu().solve(&rhs) else {
            scan.singular_supports.push(support);
            continue;
        };
        if support.iter().enumerate().any(|(r, _)| sol[r] <= tol) {
            continue;
        }
        let mut weights = vec![0.0; n];
        for (r, &i) in support.iter().enumerate() {
            weights[i] = sol[r];
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let Ok(strategy) = MixedStrategy::new(weights) else {
            continue;
        };
        if replicator_rhs(&strategy, a)?.norm() > tol {
            continue;
        }
        let verdict = certify_nash(&strategy, a, DEFAULT_TOL)?.verdict;
        let eigenvalues = transversal_eigenvalues(&strategy, a)?;
        let stable = eigenvalues.iter().all(|l| l.re < 0.0);
        scan.points.push(FixedPoint {
            strategy,
            support,
            verdict,
            eigenvalues,
            stable,
        });
    }
    Ok(scan)
}

/// Instantaneous rate of the Shannon entropy of `x` under the replicator
/// flow, `Σ_i U_i (h_i - x_i)` with `U_i = f_i - <f>` and `h_i = -x_i ln x_i`.
///
/// Refuses states with a component below [`BOUNDARY_EPS`], where the
/// logarithm diverges.
pub fn shannon_rate(x: &MixedStrategy, a: &PayoffMatrix) -> Result<f64> {
    Error::check_dim("shannon_rate", a.dim(), x.len())?;
    shannon_rate_raw(x.as_vector(), a.matrix())
}

pub(crate) fn shannon_rate_raw(x: &DVector<f64>, a: &DMatrix<f64>) -> Result<f64> {
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, &v)| v < BOUNDARY_EPS) {
        return Err(Error::Boundary { index, value });
    }
    let f = a * x;
    let mean = x.dot(&f);
    Ok(x.iter()
        .zip(f.iter())
        .map(|(&xi, &fi)| (fi - mean) * (-xi * xi.ln() - xi))
        .sum())
}
