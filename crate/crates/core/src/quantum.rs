//! Density operators, the quantization map from population states, the von
//! Neumann equation `iħ dρ/dt = [H, ρ]`, and von Neumann entropy.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, PayoffMatrix};
use crate::lax::{freq_matrix, LambdaMatrix};
use crate::linalg::{commutator, hermiticity_defect};
use crate::ode::{self, IntegratorConfig, Method};

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues down to `-PSD_TOL` are rounding noise; below that the
/// matrix is not a state.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues of integrated states drift by up to this much around zero;
/// [`spectral_entropy`] treats them as zero.
pub const SPECTRUM_NOISE: f64 = 1e-7;
/// Diagonal noise clamped before building the self-consistent Hamiltonian.
pub const DIAGONAL_CLAMP: f64 = 1e-12;

const I: Complex64 = Complex { re: 0.0, im: 1.0 };

fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the Hermitian
/// part of `m` is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(CMatrix);

impl DensityOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() == 0 || !m.is_square() {
            return Err(Error::invalid("density operator", "must be a non-empty square matrix"));
        }
        let herm = hermiticity_defect(&m);
        if herm > HERMITIAN_TOL {
            return Err(Error::invalid("density operator", format!("not Hermitian (defect {herm:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::invalid("density operator", format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&m)[0];
        if min < -PSD_TOL {
            return Err(Error::invalid(
                "density operator",
                format!("smallest eigenvalue {min:e} is negative"),
            ));
        }
        Ok(Self(m))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(complexify(m))
    }

    /// The maximally mixed state `I/n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("density operator", "dimension must be >= 1"));
        }
        Ok(Self(CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0)))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Populations `ρ_ii`.
    pub fn populations(&self) -> DVector<f64> {
        self.0.diagonal().map(|z| z.re)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        purity(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.0)
    }
}

pub(crate) fn purity(m: &CMatrix) -> f64 {
    // Tr ρ² = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ.
    (m * m).trace().re
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    entries: CMatrix,
    hbar: f64,
}

impl Hamiltonian {
    pub fn new(entries: CMatrix, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::invalid("hamiltonian", format!("hbar = {hbar} must be > 0")));
        }
        if !entries.is_square() {
            return Err(Error::invalid("hamiltonian", "must be square"));
        }
        let herm = hermiticity_defect(&entries);
        if herm > HERMITIAN_TOL {
            return Err(Error::invalid("hamiltonian", format!("not Hermitian (defect {herm:e})")));
        }
        Ok(Self { entries, hbar })
    }

    pub fn from_real(entries: &DMatrix<f64>, hbar: f64) -> Result<Self> {
        Self::new(complexify(entries), hbar)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }
}

/// `ρ = Σ_k p_k |Ψ_k⟩⟨Ψ_k|`.
pub fn density_from_ensemble(states: &[DVector<Complex64>], probs: &[f64]) -> Result<DensityOperator> {
    Error::check_dim("density_from_ensemble", states.len(), probs.len())?;
    let weights = MixedStrategy::new(probs.to_vec())?;
    let n = states
        .first()
        .map(|s| s.len())
        .ok_or_else(|| Error::invalid("ensemble", "no states given"))?;
    let mut rho = CMatrix::zeros(n, n);
    for (k, (psi, &p)) in states.iter().zip(weights.as_slice()).enumerate() {
        Error::check_dim("density_from_ensemble state", n, psi.len())?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("ensemble", format!("state {k} has norm {norm}")));
        }
        rho += psi * psi.adjoint() * Complex64::new(p, 0.0);
    }
    DensityOperator::new(rho)
}

/// Image of the frequency matrix: `ρ_ij = sqrt(x_i x_j)`, a pure state.
pub fn quantize(x: &MixedStrategy) -> DensityOperator {
    DensityOperator(complexify(freq_matrix(x).matrix()))
}

/// `H = iħΛ`, the Hamiltonian under which the von Neumann equation
/// reproduces the commutator flow `[Λ, ρ]`.
pub fn hamiltonian_from_lambda(lambda: &LambdaMatrix, hbar: f64) -> Result<Hamiltonian> {
    let h = lambda.matrix().map(|v| Complex64::new(0.0, hbar * v));
    Hamiltonian::new(h, hbar)
}

fn vn_rhs(h: &CMatrix, hbar: f64, rho: &CMatrix) -> CMatrix {
    commutator(h, rho) * (-I / hbar)
}

/// `dρ/dt = -(i/ħ)[H, ρ]`.
pub fn von_neumann_rhs(rho: &DensityOperator, h: &Hamiltonian) -> Result<CMatrix> {
    Error::check_dim("von_neumann_rhs", h.dim(), rho.dim())?;
    Ok(vn_rhs(&h.entries, h.hbar, &rho.0))
}

/// Where the Hamiltonian driving [`evolve`] comes from.
pub enum HamiltonianSource {
    Fixed(Hamiltonian),
    TimeDependent {
        dim: usize,
        hbar: f64,
        at: Box<dyn Fn(f64) -> CMatrix + Send + Sync>,
    },
    /// At every stage `H = iħΛ(x, A)` with `x = diag ρ`, closing the loop
    /// between the quantized state and the replicator generator.
    SelfConsistent { payoff: PayoffMatrix, hbar: f64 },
}

impl HamiltonianSource {
    fn dim(&self) -> usize {
        match self {
            HamiltonianSource::Fixed(h) => h.dim(),
            HamiltonianSource::TimeDependent { dim, .. } => *dim,
            HamiltonianSource::SelfConsistent { payoff, .. } => payoff.dim(),
        }
    }

    fn hbar(&self) -> f64 {
        match self {
            HamiltonianSource::Fixed(h) => h.hbar,
            HamiltonianSource::TimeDependent { hbar, .. } | HamiltonianSource::SelfConsistent { hbar, .. } => {
                *hbar
            }
        }
    }

    /// `dρ/dt = -(i/ħ)[H(t, ρ), ρ]` for this source.
    pub fn rhs(&self, t: f64, rho: &CMatrix) -> CMatrix {
        let hbar = self.hbar();
        match self {
            HamiltonianSource::Fixed(h) => vn_rhs(&h.entries, hbar, rho),
            HamiltonianSource::TimeDependent { at, .. } => vn_rhs(&at(t), hbar, rho),
            HamiltonianSource::SelfConsistent { payoff, .. } => {
                vn_rhs(&self_consistent_hamiltonian(rho, payoff.matrix(), hbar), hbar, rho)
            }
        }
    }
}

/// `iħΛ(diag ρ, A)` with `Λ_ij = ½ (f_i - f_j) sqrt(x_i x_j)`.
pub(crate) fn self_consistent_hamiltonian(rho: &CMatrix, a: &DMatrix<f64>, hbar: f64) -> CMatrix {
    let x = rho.diagonal().map(|z| {
        if z.re < 0.0 && z.re >= -DIAGONAL_CLAMP {
            0.0
        } else {
            z.re
        }
    });
    let root = x.map(f64::sqrt);
    let f = a * &x;
    let n = x.len();
    CMatrix::from_fn(n, n, |i, j| Complex64::new(0.0, hbar * 0.5 * (f[i] - f[j]) * root[i] * root[j]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDrift {
    /// `|Tr ρ - 1|`.
    pub trace: f64,
    /// `max |ρ - ρ†|`.
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    /// `Tr ρ²`.
    pub purity: f64,
}

impl DensityDrift {
    fn measure(m: &CMatrix) -> Self {
        let tr = m.trace();
        Self {
            trace: (tr - Complex64::new(1.0, 0.0)).norm(),
            hermiticity: hermiticity_defect(m),
            min_eigenvalue: hermitian_eigenvalues(m)[0],
            purity: purity(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    pub drift: Vec<DensityDrift>,
    pub method: Method,
    pub dt: f64,
}

impl DensityTrajectory {
    pub fn final_state(&self) -> &CMatrix {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn populations(&self, k: usize) -> DVector<f64> {
        self.states[k].diagonal().map(|z| z.re)
    }
}

/// Integrates the von Neumann equation. States are never projected back
/// onto valid density operators; `cfg.renormalize` is ignored and drift is
/// recorded per sample.
pub fn evolve(
    rho0: &DensityOperator,
    source: &HamiltonianSource,
    cfg: &IntegratorConfig,
) -> Result<DensityTrajectory> {
    Error::check_dim("evolve", source.dim(), rho0.dim())?;
    cfg.validate()?;
    let hbar = source.hbar();
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::invalid("hamiltonian", format!("hbar = {hbar} must be > 0")));
    }
    let steps = cfg.steps();
    let mut rhs = |t: f64, rho: &CMatrix| source.rhs(t, rho);

    let mut out = DensityTrajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        drift: Vec::with_capacity(steps + 1),
        method: cfg.method,
        dt: cfg.dt,
    };
    let mut rho = rho0.0.clone();
    out.times.push(0.0);
    out.drift.push(DensityDrift::measure(&rho));
    out.states.push(rho.clone());
    for k in 1..=steps {
        let t_prev = cfg.time(k - 1);
        let t = cfg.time(k);
        rho = ode::step_t(cfg.method, t_prev, &rho, cfg.dt, &mut rhs);
        if !rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite { time: t });
        }
        out.times.push(t);
        out.drift.push(DensityDrift::measure(&rho));
        out.states.push(rho.clone());
    }
    Ok(out)
}

/// `-Σ λ_k ln λ_k` over the spectrum of a Hermitian matrix, with eigenvalues
/// in `[-SPECTRUM_NOISE, 0)` clamped to zero.
pub fn spectral_entropy(m: &CMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in hermitian_eigenvalues(m) {
        if lambda < -SPECTRUM_NOISE {
            return Err(Error::invalid(
                "density operator",
                format!("eigenvalue {lambda:e} is negative"),
            ));
        }
        if lambda > 0.0 {
            s -= lambda * lambda.ln();
        }
    }
    Ok(s.max(0.0))
}

/// `S = -Tr ρ ln ρ`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    spectral_entropy(&rho.0).expect("validated density operators are positive semidefinite")
}

/// Four-term truncation of `dS/dt` obtained from
/// `ln ρ ≈ (ρ-I) - ½(ρ-I)² + ⅓(ρ-I)³`:
///
/// `11/6 Tr ρ' - 6 Tr ρρ' + 9/2 Tr ρ²ρ' - 4/3 Tr ρ³ρ'`.
///
/// The remainder of the expansion is not modelled; compare against
/// [`exact_entropy_rate`] to measure it.
pub fn vn_entropy_rate_series(rho: &CMatrix, drho: &CMatrix) -> Result<f64> {
    Error::check_dim("vn_entropy_rate_series", rho.nrows(), drho.nrows())?;
    if !rho.is_square() || !drho.is_square() {
        return Err(Error::invalid("vn_entropy_rate_series", "matrices must be square"));
    }
    let rho2 = rho * rho;
    let rho3 = &rho2 * rho;
    let t0 = drho.trace();
    let t1 = (rho * drho).trace();
    let t2 = (&rho2 * drho).trace();
    let t3 = (&rho3 * drho).trace();
    let total = t0 * (11.0 / 6.0) - t1 * 6.0 + t2 * 4.5 - t3 * (4.0 / 3.0);
    Ok(total.re)
}

/// `dS/dt = -Σ_k λ'_k (ln λ_k + 1)` with `λ'_k = ⟨v_k|ρ'|v_k⟩` from first
/// order perturbation theory. Eigenvalues at or below `1e-12` contribute
/// nothing while their derivative stays below `1e-10`; a zero eigenvalue
/// that starts to grow makes the rate `+inf`.
pub fn exact_entropy_rate(rho: &CMatrix, drho: &CMatrix) -> Result<f64> {
    Error::check_dim("exact_entropy_rate", rho.nrows(), drho.nrows())?;
    let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut rate = 0.0;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let dl = (v.adjoint() * drho * v)[(0, 0)].re;
        if lambda <= 1e-12 {
            if dl > 1e-10 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        rate -= dl * (lambda.ln() + 1.0);
    }
    Ok(rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::shannon_entropy;
    use crate::lax::lambda_matrix;
    use crate::linalg::max_abs;
    use crate::replicator::{integrate, replicator_rhs};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ket(v: &[f64]) -> DVector<Complex64> {
        DVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))
    }

    fn pd() -> PayoffMatrix {
        PayoffMatrix::from_rows(&[vec![3.0, 0.0], vec![5.0, 1.0]]).unwrap()
    }

    fn hawk_dove() -> PayoffMatrix {
        PayoffMatrix::from_rows(&[vec![-1.0, 2.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn ensemble_examples() {
        let rho = density_from_ensemble(&[ket(&[1.0, 0.0, 0.0])], &[1.0]).unwrap();
        assert_eq!(rho.populations().as_slice(), &[1.0, 0.0, 0.0]);

        let rho = density_from_ensemble(&[ket(&[1.0, 0.0]), ket(&[0.0, 1.0])], &[0.5, 0.5]).unwrap();
        assert_eq!(rho.matrix(), &(CMatrix::identity(2, 2) * c(0.5)));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = density_from_ensemble(&[ket(&[1.0, 0.0]), ket(&[s, s])], &[0.5, 0.5]).unwrap();
        let expected = [[0.75, 0.25], [0.25, 0.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.matrix()[(i, j)] - c(expected[i][j])).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn ensemble_rejects_bad_input() {
        assert!(density_from_ensemble(&[ket(&[1.0, 1.0])], &[1.0]).is_err());
        assert!(density_from_ensemble(&[ket(&[1.0, 0.0])], &[0.7]).is_err());
        assert!(density_from_ensemble(&[], &[]).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::from_real(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5])).is_err());
        assert!(DensityOperator::from_real(&DMatrix::from_row_slice(2, 2, &[1.5, 0.0, 0.0, -0.5])).is_err());
        assert!(DensityOperator::from_real(&DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.5])).is_err());
    }

    #[test]
    fn quantize_examples() {
        let rho = quantize(&MixedStrategy::pure(3, 0).unwrap());
        assert_eq!(rho.matrix()[(0, 0)], c(1.0));
        assert_eq!(rho.matrix().iter().filter(|z| z.norm() != 0.0).count(), 1);

        let rho = quantize(&MixedStrategy::new(vec![0.5, 0.5]).unwrap());
        assert!(rho.matrix().iter().all(|&z| z == c(0.5)));

        let x = MixedStrategy::new(vec![0.2, 0.3, 0.5]).unwrap();
        let rho = quantize(&x);
        assert!(von_neumann_entropy(&rho) < 1e-7);
        let diag = rho.populations();
        let h = shannon_entropy(diag.as_slice()).unwrap();
        assert!((h - shannon_entropy(x.as_slice()).unwrap()).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_from_lambda_examples() {
        let zero = LambdaMatrix::new(DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(max_abs(hamiltonian_from_lambda(&zero, 1.0).unwrap().matrix()), 0.0);

        let l = lambda_matrix(&MixedStrategy::new(vec![0.5, 0.5]).unwrap(), &pd()).unwrap();
        let h = hamiltonian_from_lambda(&l, 1.0).unwrap();
        assert_eq!(h.matrix()[(0, 1)], Complex64::new(0.0, -0.375));
        assert_eq!(h.matrix()[(1, 0)], Complex64::new(0.0, 0.375));
        // ±0.375
        let ev = h.eigenvalues();
        assert!((ev[0] + 0.375).abs() < 1e-14 && (ev[1] - 0.375).abs() < 1e-14);
        assert!(hamiltonian_from_lambda(&zero, 0.0).is_err());
    }

    #[test]
    fn von_neumann_rhs_examples() {
        let rho = DensityOperator::from_real(&DMatrix::from_row_slice(2, 2, &[0.3, 0.0, 0.0, 0.7])).unwrap();
        let h = Hamiltonian::from_real(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -2.0]), 1.0).unwrap();
        assert_eq!(max_abs(&von_neumann_rhs(&rho, &h).unwrap()), 0.0);

        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        let h = Hamiltonian::from_real(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -2.0]), 1.0).unwrap();
        assert_eq!(max_abs(&von_neumann_rhs(&mixed, &h).unwrap()), 0.0);

        let x = MixedStrategy::new(vec![0.5, 0.5]).unwrap();
        let h = hamiltonian_from_lambda(&lambda_matrix(&x, &pd()).unwrap(), 1.0).unwrap();
        let d = von_neumann_rhs(&quantize(&x), &h).unwrap();
        let r = replicator_rhs(&x, &pd()).unwrap();
        for i in 0..2 {
            assert!((d[(i, i)].re - r[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn hbar_rescales_time_only() {
        let x = MixedStrategy::new(vec![0.3, 0.7]).unwrap();
        let l = lambda_matrix(&x, &pd()).unwrap();
        let d1 = von_neumann_rhs(&quantize(&x), &hamiltonian_from_lambda(&l, 1.0).unwrap()).unwrap();
        let d2 = von_neumann_rhs(&quantize(&x), &hamiltonian_from_lambda(&l, 2.5).unwrap()).unwrap();
        assert!(max_abs(&(d1 - d2)) < 1e-15);
    }

    #[test]
    fn evolution_examples() {
        let cfg = IntegratorConfig::rk4(0.01, 1.0).unwrap();
        let rho0 = density_from_ensemble(&[ket(&[1.0, 0.0]), ket(&[0.6, 0.8])], &[0.3, 0.7]).unwrap();
        let zero = HamiltonianSource::Fixed(Hamiltonian::new(CMatrix::zeros(2, 2), 1.0).unwrap());
        let traj = evolve(&rho0, &zero, &cfg).unwrap();
        assert!(traj.states.iter().all(|m| m == rho0.matrix()));

        let diag_rho = DensityOperator::from_real(&DMatrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 0.6])).unwrap();
        let diag_h = Hamiltonian::from_real(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0]), 1.0).unwrap();
        let traj = evolve(&diag_rho, &HamiltonianSource::Fixed(diag_h), &cfg).unwrap();
        assert!(traj.states.iter().all(|m| m == diag_rho.matrix()));
    }

    #[test]
    fn time_dependent_source_is_called_with_stage_times() {
        let cfg = IntegratorConfig::rk4(0.01, 1.0).unwrap();
        let rho0 = density_from_ensemble(&[ket(&[0.6, 0.8])], &[1.0]).unwrap();
        let source = HamiltonianSource::TimeDependent {
            dim: 2,
            hbar: 1.0,
            at: Box::new(|t| CMatrix::from_row_slice(2, 2, &[c(0.0), c(t), c(t), c(0.0)])),
        };
        let traj = evolve(&rho0, &source, &cfg).unwrap();
        // H(t) = t σx gives the exact propagator exp(-i σx t²/2).
        let phase: f64 = 0.5;
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(phase.cos()),
                Complex64::new(0.0, -phase.sin()),
                Complex64::new(0.0, -phase.sin()),
                c(phase.cos()),
            ],
        );
        let exact = &u * rho0.matrix() * u.adjoint();
        assert!(max_abs(&(traj.final_state() - exact)) < 1e-8);
    }

    #[test]
    fn self_consistent_hawk_dove_tracks_replicator() {
        let x0 = MixedStrategy::new(vec![0.9, 0.1]).unwrap();
        let cfg = IntegratorConfig::rk4(0.001, 10.0).unwrap();
        let source = HamiltonianSource::SelfConsistent {
            payoff: hawk_dove(),
            hbar: 1.0,
        };
        let q = evolve(&quantize(&x0), &source, &cfg).unwrap();
        let v = integrate(&x0, &hawk_dove(), &cfg).unwrap();
        for (k, state) in v.states.iter().enumerate() {
            assert!((q.populations(k) - state).amax() < 1e-5);
        }
    }

    #[test]
    fn entropy_examples() {
        let pure = quantize(&MixedStrategy::new(vec![0.5, 0.5]).unwrap());
        assert!(von_neumann_entropy(&pure) < 1e-7);
        let mixed = DensityOperator::maximally_mixed(4).unwrap();
        assert!((von_neumann_entropy(&mixed) - 4f64.ln()).abs() < 1e-14);
        let rho = DensityOperator::from_real(&DMatrix::from_row_slice(2, 2, &[0.75, 0.0, 0.0, 0.25])).unwrap();
        assert!((von_neumann_entropy(&rho) - 0.562_335_144_618_808_3).abs() < 1e-14);
        let bad = complexify(&DMatrix::from_row_slice(2, 2, &[1.1, 0.0, 0.0, -0.1]));
        assert!(spectral_entropy(&bad).is_err());
    }

    /// Straight transcription of the printed sum as nested loops.
    fn series_by_loops(rho: &CMatrix, d: &CMatrix) -> f64 {
        let n = rho.nrows();
        let mut s1 = c(0.0);
        let mut s2 = c(0.0);
        let mut s3 = c(0.0);
        let mut s4 = c(0.0);
        for i in 0..n {
            s1 += d[(i, i)];
            for j in 0..n {
                s2 += rho[(i, j)] * d[(j, i)];
                for k in 0..n {
                    s3 += rho[(i, j)] * rho[(j, k)] * d[(k, i)];
                    for l in 0..n {
                        s4 += rho[(i, j)] * rho[(j, k)] * rho[(k, l)] * d[(l, i)];
                    }
                }
            }
        }
        (s1 * (11.0 / 6.0) - s2 * 6.0 + s3 * 4.5 - s4 * (4.0 / 3.0)).re
    }

    #[test]
    fn series_examples() {
        let rho = DensityOperator::maximally_mixed(3).unwrap();
        assert_eq!(vn_entropy_rate_series(rho.matrix(), &CMatrix::zeros(3, 3)).unwrap(), 0.0);

        let d = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.2),
                Complex64::new(0.1, 0.3),
                c(-0.4),
                Complex64::new(0.1, -0.3),
                c(-0.5),
                Complex64::new(0.0, 0.2),
                c(-0.4),
                Complex64::new(0.0, -0.2),
                c(0.3),
            ],
        );
        let fast = vn_entropy_rate_series(rho.matrix(), &d).unwrap();
        assert!((fast - series_by_loops(rho.matrix(), &d)).abs() < 1e-15);

        let general = density_from_ensemble(
            &[ket(&[1.0, 0.0, 0.0]), ket(&[0.0, 0.6, 0.8]), ket(&[0.48, 0.6, 0.64])],
            &[0.2, 0.5, 0.3],
        )
        .unwrap();
        let fast = vn_entropy_rate_series(general.matrix(), &d).unwrap();
        assert!((fast - series_by_loops(general.matrix(), &d)).abs() < 1e-14);
    }

    #[test]
    fn exact_rate_matches_entropy_difference() {
        let rho = density_from_ensemble(&[ket(&[1.0, 0.0]), ket(&[0.6, 0.8])], &[0.4, 0.6]).unwrap();
        let target = DensityOperator::maximally_mixed(2).unwrap();
        // Straight-line path toward I/n.
        let d = target.matrix() - rho.matrix();
        let h = 1e-5;
        let s = |eps: f64| spectral_entropy(&(rho.matrix() + &d * c(eps))).unwrap();
        let fd = (s(h) - s(-h)) / (2.0 * h);
        assert!((exact_entropy_rate(rho.matrix(), &d).unwrap() - fd).abs() < 1e-8);

        let h_op = Hamiltonian::from_real(&DMatrix::from_row_slice(2, 2, &[0.3, 1.0, 1.0, -0.2]), 1.0).unwrap();
        let unitary = von_neumann_rhs(&rho, &h_op).unwrap();
        assert!(exact_entropy_rate(rho.matrix(), &unitary).unwrap().abs() < 1e-14);
        assert!(vn_entropy_rate_series(rho.matrix(), &unitary).unwrap().abs() < 1e-14);
    }
}
