//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use egtq::lax::{freq_matrix, integrate_matrix, MatrixTrajectory};
use egtq::nalgebra::{DMatrix, DVector};
use egtq::{
    certify_ess, certify_nash, evolve, gibbs_distribution, integrate, maxent_distribution_unconstrained,
    quantize, shannon_entropy, shannon_rate, solve_beta, spectral_entropy, thermo_state,
    verify_identities, vn_entropy_rate_series, CMatrix, Complex64, DensityOperator,
    DensityTrajectory, EnergySpectrum, Hamiltonian, HamiltonianSource, IdentityOutcome,
    IntegratorConfig, MixedStrategy, PayoffMatrix, Trajectory, Verdict, DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_game(rng: &mut impl Rng, n: usize, bound: f64) -> PayoffMatrix {
    PayoffMatrix::new(DMatrix::from_fn(n, n, |_, _| rng.random_range(-bound..=bound))).unwrap()
}

fn random_interior(rng: &mut impl Rng, n: usize) -> MixedStrategy {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    MixedStrategy::new(w.into_iter().map(|v| v / s).collect::<Vec<_>>()).unwrap()
}

fn cmax(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn pd() -> PayoffMatrix {
    PayoffMatrix::from_rows(&[vec![3.0, 0.0], vec![5.0, 1.0]]).unwrap()
}

fn hawk_dove() -> PayoffMatrix {
    PayoffMatrix::from_rows(&[vec![-1.0, 2.0], vec![0.0, 1.0]]).unwrap()
}

fn rps() -> PayoffMatrix {
    PayoffMatrix::from_rows(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]).unwrap()
}

/// Shared instance set for the first three criteria.
struct Instance {
    game: PayoffMatrix,
    vector: Trajectory,
    matrix: MatrixTrajectory,
    density: Option<DensityTrajectory>,
}

fn build_instances(rng: &mut impl Rng, cfg: &IntegratorConfig) -> (Vec<Instance>, f64) {
    let dims = [2, 3, 4, 6];
    let start = Instant::now();
    let instances = (0..20)
        .map(|k| {
            let n = dims[k % dims.len()];
            let game = random_game(rng, n, 5.0);
            let x0 = random_interior(rng, n);
            let vector = integrate(&x0, &game, cfg).unwrap();
            let matrix = integrate_matrix(&x0, &game, cfg).unwrap();
            Instance { game, vector, matrix, density: None }
        })
        .collect();
    (instances, start.elapsed().as_secs_f64())
}

fn lax_vector_equivalence(instances: &[Instance], seconds: f64) -> Outcome {
    let mut worst = 0.0f64;
    for inst in instances {
        for (x, m) in inst.vector.states.iter().zip(&inst.matrix.matrices) {
            worst = worst.max((m.diagonal() - x).amax());
        }
    }
    outcome(
        worst <= 1e-5 && seconds <= 10.0,
        format!("max |diag X - x| = {worst:.3e} over {} games, {seconds:.2} s", instances.len()),
    )
}

fn quantization_correspondence(instances: &mut [Instance], cfg: &IntegratorConfig) -> Outcome {
    let mut worst = 0.0f64;
    let mut trace = 0.0f64;
    let mut purity = 0.0f64;
    for inst in instances.iter_mut() {
        let x0 = inst.vector.strategy(0).unwrap();
        let source = HamiltonianSource::SelfConsistent { payoff: inst.game.clone(), hbar: 1.0 };
        let q = evolve(&quantize(&x0), &source, cfg).unwrap();
        for (rho, x) in q.states.iter().zip(&inst.vector.states) {
            let expect = freq_matrix(&MixedStrategy::new(x.as_slice().to_vec()).unwrap());
            let diff = rho - expect.matrix().map(|v| Complex64::new(v, 0.0));
            worst = worst.max(cmax(&diff));
            trace = trace.max((rho.trace().re - 1.0).abs());
            purity = purity.max(((rho * rho).trace().re - 1.0).abs());
        }
        inst.density = Some(q);
    }
    outcome(
        worst <= 1e-5 && trace <= 1e-7 && purity <= 1e-7,
        format!("max |rho - X(x)| = {worst:.3e}, |Tr rho - 1| = {trace:.3e}, |Tr rho^2 - 1| = {purity:.3e}"),
    )
}

fn matrix_properties(instances: &[Instance]) -> Outcome {
    let mut herm = 0.0f64;
    let mut trace = 0.0f64;
    let mut idem = 0.0f64;
    let mut purity = f64::NEG_INFINITY;
    let mut count = 0usize;
    for inst in instances {
        trace = trace.max(inst.vector.meta.max_simplex_drift);
        for m in &inst.matrix.matrices {
            herm = herm.max((m - m.transpose()).amax());
            trace = trace.max((m.trace() - 1.0).abs());
            idem = idem.max((m * m - m).amax());
            count += 1;
        }
        for x in &inst.vector.states {
            let xm = freq_matrix(&MixedStrategy::new(x.as_slice().to_vec()).unwrap());
            herm = herm.max(xm.asymmetry());
            idem = idem.max(xm.idempotency_defect());
            count += 1;
        }
        for (rho, drift) in inst.density.iter().flat_map(|d| d.states.iter().zip(&d.drift)) {
            herm = herm.max(cmax(&(rho - rho.adjoint()))).max(drift.hermiticity);
            trace = trace.max(drift.trace);
            purity = purity.max((rho * rho).trace().re);
            count += 1;
        }
    }
    outcome(
        herm <= 1e-12 && trace <= 1e-8 && idem <= 1e-6 && purity <= 1.0 + 1e-10,
        format!(
            "{count} matrices: hermiticity {herm:.3e}, trace {trace:.3e}, |X^2 - X| {idem:.3e}, max Tr rho^2 - 1 = {:.3e}",
            purity - 1.0
        ),
    )
}

fn entropy_rate_identity(rng: &mut impl Rng) -> Outcome {
    let dt = 1e-4;
    let cfg = IntegratorConfig::rk4(dt, 2.0).unwrap();
    let mut worst = 0.0f64;
    let mut points = 0;
    for _ in 0..10 {
        let game = random_game(rng, 3, 5.0);
        let x0 = random_interior(rng, 3);
        let traj = integrate(&x0, &game, &cfg).unwrap();
        let h = |k: usize| shannon_entropy(traj.states[k].as_slice()).unwrap();
        for j in 1..=10 {
            let k = j * (traj.len() - 1) / 11;
            let fd = (h(k + 1) - h(k - 1)) / (2.0 * dt);
            let rate = shannon_rate(&traj.strategy(k).unwrap(), &game).unwrap();
            worst = worst.max((rate - fd).abs());
            points += 1;
        }
    }
    outcome(worst <= 1e-6, format!("max |rate - FD| = {worst:.3e} at {points} points"))
}

fn random_density(rng: &mut impl Rng, n: usize) -> DensityOperator {
    let b = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = &b * b.adjoint();
    let tr = m.trace();
    DensityOperator::new(m / tr).unwrap()
}

fn random_hamiltonian(rng: &mut impl Rng, n: usize) -> Hamiltonian {
    let b = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Hamiltonian::new((&b + b.adjoint()) * Complex64::new(0.5, 0.0), 1.0).unwrap()
}

fn unitary_entropy(rng: &mut impl Rng) -> Outcome {
    let cfg = IntegratorConfig::rk4(1e-3, 10.0).unwrap();
    let mut drift = 0.0f64;
    let mut fitted_c = 0.0f64;
    let mut series_max = 0.0f64;
    for k in 0..6 {
        let n = 2 + k % 3;
        let rho0 = random_density(rng, n);
        let h = random_hamiltonian(rng, n);
        let s0 = spectral_entropy(rho0.matrix()).unwrap();
        let traj = evolve(&rho0, &HamiltonianSource::Fixed(h.clone()), &cfg).unwrap();
        let mixed = CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0);
        for rho in traj.states.iter().step_by(10) {
            drift = drift.max((spectral_entropy(rho).unwrap() - s0).abs());
            let drho = (h.matrix() * rho - rho * h.matrix()) * Complex64::new(0.0, -1.0 / h.hbar());
            let series = vn_entropy_rate_series(rho, &drho).unwrap().abs();
            series_max = series_max.max(series);
            let dist = (rho - &mixed).norm();
            if dist > 1e-3 {
                fitted_c = fitted_c.max(series / dist.powi(4));
            }
        }
    }
    outcome(
        drift <= 1e-6 && fitted_c.is_finite(),
        format!("entropy drift {drift:.3e}; max |series| = {series_max:.3e}, fitted C = {fitted_c:.3e}"),
    )
}

fn simplex_grid(step: f64) -> Vec<[f64; 3]> {
    let m = (1.0 / step).round() as usize;
    let mut out = Vec::new();
    for i in 0..=m {
        for j in 0..=m - i {
            out.push([i as f64 / m as f64, j as f64 / m as f64, (m - i - j) as f64 / m as f64]);
        }
    }
    out
}

fn gibbs_optimality(rng: &mut impl Rng) -> Outcome {
    let grid = simplex_grid(0.01);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut min_points = usize::MAX;
    for _ in 0..10 {
        let levels: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let e = EnergySpectrum::new(levels.clone()).unwrap();
        let target = e.min() + rng.random_range(0.15..0.85) * (e.max() - e.min());
        let gibbs = thermo_state(&e, solve_beta(&e, target).unwrap()).unwrap();
        // A slice of half-width δ admits an excess of at most |β|δ.
        let delta = 1e-3 / (2.0 * gibbs.beta.abs().max(1.0));
        let mut points = 0;
        for x in &grid {
            let u: f64 = x.iter().zip(&levels).map(|(p, l)| p * l).sum();
            if (u - target).abs() <= delta {
                points += 1;
                worst_excess = worst_excess.max(shannon_entropy(x).unwrap() - gibbs.entropy);
            }
        }
        min_points = min_points.min(points);
    }
    let uniform = maxent_distribution_unconstrained(3).unwrap();
    let any_beta_zero = gibbs_distribution(&EnergySpectrum::new(vec![0.3, -1.0, 2.0]).unwrap(), 0.0).unwrap();
    let exact = uniform == vec![1.0 / 3.0; 3] && any_beta_zero == uniform;
    let argmax = grid
        .iter()
        .max_by(|a, b| shannon_entropy(&a[..]).unwrap().total_cmp(&shannon_entropy(&b[..]).unwrap()))
        .unwrap();
    let near = argmax.iter().all(|v| (v - 1.0 / 3.0).abs() <= 0.01);
    outcome(
        worst_excess <= 1e-3 && min_points > 0 && exact && near,
        format!(
            "max excess over Gibbs {worst_excess:.3e} (>= {min_points} grid points per slice); uniform exact: {exact}; grid argmax {argmax:?}"
        ),
    )
}

fn thermodynamic_identities(rng: &mut impl Rng) -> Outcome {
    let h = 1e-4;
    let mut worst_rel = 0.0f64;
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = f64::NEG_INFINITY;
    let mut checked = 0;
    for _ in 0..10 {
        let n = rng.random_range(2..=8);
        let levels: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let e = EnergySpectrum::new(levels).unwrap();
        for beta in [0.3, 1.0, 2.0] {
            let full = verify_identities(&e, beta, h).unwrap();
            let half = verify_identities(&e, beta, h / 2.0).unwrap();
            for (a, b) in full.checks.iter().zip(&half.checks) {
                if let (IdentityOutcome::Checked { .. }, Some(ea), Some(eb)) =
                    (&a.outcome, a.absolute_error(), b.absolute_error())
                {
                    worst_rel = worst_rel.max(a.relative_error().unwrap());
                    let ratio = ea / eb;
                    ratio_lo = ratio_lo.min(ratio);
                    ratio_hi = ratio_hi.max(ratio);
                    checked += 1;
                }
            }
        }
    }
    outcome(
        worst_rel <= 1e-5 && ratio_lo >= 3.0 && ratio_hi <= 5.0,
        format!("{checked} checks: max relative error {worst_rel:.3e}, error ratio h/(h/2) in [{ratio_lo:.3}, {ratio_hi:.3}]"),
    )
}

fn certification() -> Outcome {
    let defect = MixedStrategy::pure(2, 1).unwrap();
    let cooperate = MixedStrategy::pure(2, 0).unwrap();
    let half = MixedStrategy::uniform(2).unwrap();
    let bary = MixedStrategy::uniform(3).unwrap();

    let pd_nash = certify_nash(&defect, &pd(), DEFAULT_TOL).unwrap().verdict;
    let pd_ess = certify_ess(&defect, &pd(), DEFAULT_TOL).unwrap().verdict;
    let hd = certify_ess(&half, &hawk_dove(), DEFAULT_TOL).unwrap().verdict;
    let rps_nash = certify_nash(&bary, &rps(), DEFAULT_TOL).unwrap().verdict;
    let rps_ess = certify_ess(&bary, &rps(), DEFAULT_TOL).unwrap().verdict;
    let coop = certify_nash(&cooperate, &pd(), DEFAULT_TOL).unwrap();

    let pass = pd_nash == Verdict::StrictNash
        && pd_ess == Verdict::Ess
        && hd == Verdict::Ess
        && rps_nash == Verdict::Nash
        && rps_ess != Verdict::Ess
        && coop.verdict == Verdict::None
        && coop.worst_deviation == 2.0;
    outcome(
        pass,
        format!(
            "PD defect {pd_nash}/{pd_ess}; Hawk-Dove mixed {hd}; RPS barycenter {rps_nash}/{rps_ess}; PD cooperate {} (worst deviation {})",
            coop.verdict, coop.worst_deviation
        ),
    )
}

fn endpoints() -> Outcome {
    let x0 = MixedStrategy::new(vec![0.9, 0.1]).unwrap();
    let cfg = IntegratorConfig::rk4(0.01, 50.0).unwrap();
    let pd_end = integrate(&x0, &pd(), &cfg).unwrap().final_state().clone();
    let pd_err = (pd_end - DVector::from_vec(vec![0.0, 1.0])).amax();
    let hd_end = integrate(&x0, &hawk_dove(), &cfg).unwrap().final_state().clone();
    let hd_err = (hd_end - DVector::from_vec(vec![0.5, 0.5])).amax();

    let cfg = IntegratorConfig::rk4(1e-3, 30.0).unwrap();
    let traj = integrate(&MixedStrategy::new(vec![0.5, 0.3, 0.2]).unwrap(), &rps(), &cfg).unwrap();
    let invariant = |x: &DVector<f64>| x.iter().product::<f64>().cbrt();
    let c0 = invariant(&traj.states[0]);
    let rps_err = traj.states.iter().map(|x| (invariant(x) - c0).abs()).fold(0.0, f64::max);
    outcome(
        pd_err <= 1e-4 && hd_err <= 1e-4 && rps_err <= 1e-4,
        format!("PD {pd_err:.3e}, Hawk-Dove {hd_err:.3e}, RPS invariant drift {rps_err:.3e}"),
    )
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let cfg = IntegratorConfig::rk4(1e-3, 10.0).unwrap();
    let (mut instances, seconds) = build_instances(&mut rng, &cfg);

    let mut results = Vec::new();
    results.push(("lax/vector equivalence", lax_vector_equivalence(&instances, seconds)));
    results.push(("quantization correspondence", quantization_correspondence(&mut instances, &cfg)));
    results.push(("matrix property suite", matrix_properties(&instances)));
    results.push(("entropy rate identity", entropy_rate_identity(&mut rng)));
    results.push(("unitary entropy conservation", unitary_entropy(&mut rng)));
    results.push(("gibbs optimality", gibbs_optimality(&mut rng)));
    results.push(("thermodynamic identities", thermodynamic_identities(&mut rng)));
    results.push(("equilibrium certification", certification()));
    results.push(("dynamics endpoints", endpoints()));

    let mut failed = 0;
    for (k, (name, r)) in results.iter().enumerate() {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name}: {}", k + 1, r.detail);
        if !r.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
