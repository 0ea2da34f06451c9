//! Entropy maximization over level populations: the Gibbs distribution,
//! its partition function and the thermodynamic relations between `β`,
//! `<E>`, `S` and `<ΔE²>`.

use crate::error::{Error, Result};

/// Energy levels `E_i` of a discrete spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum(Vec<f64>);

impl EnergySpectrum {
    pub fn new(levels: impl Into<Vec<f64>>) -> Result<Self> {
        let levels = levels.into();
        if levels.is_empty() {
            return Err(Error::invalid("energy spectrum", "needs at least one level"));
        }
        if let Some((i, v)) = levels.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid("energy spectrum", format!("level {i} = {v} is not finite")));
        }
        Ok(Self(levels))
    }

    pub fn levels(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    fn shifted(&self) -> (f64, Vec<f64>) {
        let offset = self.min();
        (offset, self.0.iter().map(|e| e - offset).collect())
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("beta", format!("{beta} is not finite")))
    }
}

/// Populations and `ln Z` at inverse temperature `beta`. The exponent is
/// shifted by its maximum so `Z` never overflows.
fn boltzmann(levels: &[f64], beta: f64) -> (Vec<f64>, f64) {
    let n = levels.len();
    if beta == 0.0 {
        return (vec![1.0 / n as f64; n], (n as f64).ln());
    }
    let shift = levels
        .iter()
        .map(|e| -beta * e)
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = levels.iter().map(|e| (-beta * e - shift).exp()).collect();
    let sum: f64 = weights.iter().sum();
    (weights.iter().map(|w| w / sum).collect(), shift + sum.ln())
}

/// `ρ_ii = exp(-β E_i) / Σ_k exp(-β E_k)`.
pub fn gibbs_distribution(spectrum: &EnergySpectrum, beta: f64) -> Result<Vec<f64>> {
    check_beta(beta)?;
    Ok(boltzmann(&spectrum.0, beta).0)
}

/// The entropy maximizer without an energy constraint: uniform over `n`.
pub fn maxent_distribution_unconstrained(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("level count", "must be >= 1"));
    }
    Ok(vec![1.0 / n as f64; n])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoState {
    pub beta: f64,
    /// `1/β`; infinite at `β = 0`.
    pub tau: f64,
    pub partition: f64,
    pub log_partition: f64,
    pub mean_energy: f64,
    /// `ln Z + β <E>`.
    pub entropy: f64,
    pub energy_variance: f64,
    pub populations: Vec<f64>,
}

pub fn thermo_state(spectrum: &EnergySpectrum, beta: f64) -> Result<ThermoState> {
    check_beta(beta)?;
    let (p, log_partition) = boltzmann(&spectrum.0, beta);
    let mean: f64 = p.iter().zip(&spectrum.0).map(|(p, e)| p * e).sum();
    let variance: f64 = p
        .iter()
        .zip(&spectrum.0)
        .map(|(p, e)| p * (e - mean).powi(2))
        .sum();
    Ok(ThermoState {
        beta,
        tau: 1.0 / beta,
        partition: log_partition.exp(),
        log_partition,
        mean_energy: mean,
        entropy: log_partition + beta * mean,
        energy_variance: variance.max(0.0),
        populations: p,
    })
}

fn mean_energy(levels: &[f64], beta: f64) -> f64 {
    let (p, _) = boltzmann(levels, beta);
    p.iter().zip(levels).map(|(p, e)| p * e).sum()
}

/// Finds the `β` whose Gibbs distribution has mean energy `target`.
///
/// `<E>(β)` is strictly decreasing for a non-constant spectrum, so the root
/// is unique. Targets above the arithmetic mean give negative `β`.
pub fn solve_beta(spectrum: &EnergySpectrum, target: f64) -> Result<f64> {
    if !target.is_finite() {
        return Err(Error::invalid("target energy", format!("{target} is not finite")));
    }
    let (lo_e, hi_e) = (spectrum.min(), spectrum.max());
    let span = hi_e - lo_e;
    if span == 0.0 {
        return Err(Error::Degenerate {
            what: "energy spectrum",
            reason: "all levels are equal, so every β gives the same mean energy".into(),
        });
    }
    if target <= lo_e {
        return Err(Error::Infeasible {
            target,
            side: "above the ground level",
            bound: lo_e,
        });
    }
    if target >= hi_e {
        return Err(Error::Infeasible {
            target,
            side: "below the top level",
            bound: hi_e,
        });
    }

    let levels = &spectrum.0;
    let tol = 1e-10 * span;
    let residual = |beta: f64| mean_energy(levels, beta) - target;

    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while residual(hi) > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::invalid("solve_beta", "failed to bracket the root"));
        }
    }
    while residual(lo) < 0.0 {
        lo *= 2.0;
        if !lo.is_finite() {
            return Err(Error::invalid("solve_beta", "failed to bracket the root"));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..2000 {
        mid = 0.5 * (lo + hi);
        let r = residual(mid);
        if r.abs() <= tol || mid == lo || mid == hi {
            break;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `<E> = -∂ ln Z/∂β`
    MeanEnergy,
    /// `<ΔE²> = -∂<E>/∂β`
    VarianceFromMeanEnergy,
    /// `<ΔE²> = -(1/β) ∂S/∂β`
    VarianceFromEntropy,
    /// `∂S/∂<E> = 1/τ`
    EntropyEnergySlope,
    /// `∂²S/∂<E>² = -(1/τ²) ∂τ/∂<E>`
    EntropyEnergyCurvature,
    /// `∂S/∂β = -β <ΔE²>`
    EntropyBetaSlope,
    /// `∂²S/∂β² = ∂<E>/∂β + β ∂²<E>/∂β²`
    EntropyBetaCurvature,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::MeanEnergy,
        Identity::VarianceFromMeanEnergy,
        Identity::VarianceFromEntropy,
        Identity::EntropyEnergySlope,
        Identity::EntropyEnergyCurvature,
        Identity::EntropyBetaSlope,
        Identity::EntropyBetaCurvature,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Identity::MeanEnergy => "<E> = -dlnZ/dbeta",
            Identity::VarianceFromMeanEnergy => "<dE^2> = -d<E>/dbeta",
            Identity::VarianceFromEntropy => "<dE^2> = -(1/beta) dS/dbeta",
            Identity::EntropyEnergySlope => "dS/d<E> = 1/tau",
            Identity::EntropyEnergyCurvature => "d2S/d<E>2 = -(1/tau^2) dtau/d<E>",
            Identity::EntropyBetaSlope => "dS/dbeta = -beta <dE^2>",
            Identity::EntropyBetaCurvature => "d2S/dbeta2 = d<E>/dbeta + beta d2<E>/dbeta2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IdentityOutcome {
    Checked {
        analytic: f64,
        finite_difference: f64,
        /// `|fd - analytic| / |analytic|`, or the absolute error when the
        /// analytic value is exactly zero.
        relative_error: f64,
    },
    Undefined(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub outcome: IdentityOutcome,
}

impl IdentityCheck {
    pub fn relative_error(&self) -> Option<f64> {
        match self.outcome {
            IdentityOutcome::Checked { relative_error, .. } => Some(relative_error),
            IdentityOutcome::Undefined(_) => None,
        }
    }

    /// `|fd - analytic|`, when checked.
    pub fn absolute_error(&self) -> Option<f64> {
        match self.outcome {
            IdentityOutcome::Checked {
                analytic,
                finite_difference,
                ..
            } => Some((finite_difference - analytic).abs()),
            IdentityOutcome::Undefined(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub beta: f64,
    pub h: f64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn get(&self, identity: Identity) -> &IdentityCheck {
        self.checks
            .iter()
            .find(|c| c.identity == identity)
            .expect("every identity is reported")
    }

    pub fn max_relative_error(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(IdentityCheck::relative_error)
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative_error() <= tol
    }
}

/// Exact quantities of the Gibbs ensemble on a ground-shifted spectrum.
struct Snapshot {
    ln_z: f64,
    mean: f64,
    variance: f64,
    third_moment: f64,
    /// `-Σ p ln p`, straight from the definition.
    entropy: f64,
    /// `∂S/∂β = -Σ (∂p_i/∂β) ln p_i`.
    entropy_slope: f64,
    /// `∂<E>/∂β = Σ E_i ∂p_i/∂β`.
    mean_slope: f64,
}

impl Snapshot {
    fn at(levels: &[f64], beta: f64) -> Self {
        let (p, ln_z) = boltzmann(levels, beta);
        let mean: f64 = p.iter().zip(levels).map(|(p, e)| p * e).sum();
        let mut variance = 0.0;
        let mut third_moment = 0.0;
        let mut entropy = 0.0;
        let mut entropy_slope = 0.0;
        let mut mean_slope = 0.0;
        for (&pi, &e) in p.iter().zip(levels) {
            let dev = e - mean;
            let ln_p = -beta * e - ln_z;
            let dp = -pi * dev;
            variance += pi * dev * dev;
            third_moment += pi * dev * dev * dev;
            if pi > 0.0 {
                entropy -= pi * ln_p;
                entropy_slope -= dp * ln_p;
            }
            mean_slope += e * dp;
        }
        Self {
            ln_z,
            mean,
            variance,
            third_moment,
            entropy,
            entropy_slope,
            mean_slope,
        }
    }
}

fn compare(identity: Identity, analytic: f64, finite_difference: f64) -> IdentityCheck {
    let err = (finite_difference - analytic).abs();
    let relative_error = if analytic == 0.0 { err } else { err / analytic.abs() };
    IdentityCheck {
        identity,
        outcome: IdentityOutcome::Checked {
            analytic,
            finite_difference,
            relative_error,
        },
    }
}

fn undefined(identity: Identity, why: &'static str) -> IdentityCheck {
    IdentityCheck {
        identity,
        outcome: IdentityOutcome::Undefined(why),
    }
}

/// Checks each thermodynamic relation by comparing its closed form against
/// central finite differences of step `h` in `β`.
///
/// First derivatives difference the primitives `ln Z`, `<E>` and `S`.
/// Second derivatives take a central difference of the exact first
/// derivative of the definitions, which keeps rounding error at `O(ε/h)`.
/// Energies are measured from the ground level inside the difference
/// quotients; only `ln Z` depends on that offset and it is added back
/// exactly.
pub fn verify_identities(spectrum: &EnergySpectrum, beta: f64, h: f64) -> Result<IdentityReport> {
    check_beta(beta)?;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("finite-difference step", format!("h = {h} must be > 0")));
    }
    let (offset, levels) = spectrum.shifted();
    let at = Snapshot::at(&levels, beta);
    let up = Snapshot::at(&levels, beta + h);
    let down = Snapshot::at(&levels, beta - h);
    let diff = |f: fn(&Snapshot) -> f64| (f(&up) - f(&down)) / (2.0 * h);

    let mean = offset + at.mean;
    let var = at.variance;
    let d_ln_z = diff(|s| s.ln_z) - offset;
    let d_mean = diff(|s| s.mean);
    let d_entropy = diff(|s| s.entropy);
    let zero_beta = "undefined at beta = 0";
    let flat = "undefined for zero energy variance";

    let mut checks = vec![
        compare(Identity::MeanEnergy, mean, -d_ln_z),
        compare(Identity::VarianceFromMeanEnergy, var, -d_mean),
    ];
    checks.push(if beta == 0.0 {
        undefined(Identity::VarianceFromEntropy, zero_beta)
    } else {
        compare(Identity::VarianceFromEntropy, var, -d_entropy / beta)
    });

    let tau = 1.0 / beta;
    checks.push(if beta == 0.0 {
        undefined(Identity::EntropyEnergySlope, zero_beta)
    } else if var <= 0.0 {
        undefined(Identity::EntropyEnergySlope, flat)
    } else {
        compare(
            Identity::EntropyEnergySlope,
            1.0 / tau,
            (up.entropy - down.entropy) / (up.mean - down.mean),
        )
    });
    checks.push(if beta == 0.0 {
        undefined(Identity::EntropyEnergyCurvature, zero_beta)
    } else if var <= 0.0 {
        undefined(Identity::EntropyEnergyCurvature, flat)
    } else {
        // ∂τ/∂<E> = (∂τ/∂β) / (∂<E>/∂β) with ∂<E>/∂β = -<ΔE²>.
        let dtau_dmean = (-1.0 / (beta * beta)) / -var;
        let slope = |s: &Snapshot| s.entropy_slope / s.mean_slope;
        compare(
            Identity::EntropyEnergyCurvature,
            -dtau_dmean / (tau * tau),
            (slope(&up) - slope(&down)) / (up.mean - down.mean),
        )
    });
    checks.push(if beta == 0.0 {
        undefined(Identity::EntropyBetaSlope, zero_beta)
    } else {
        compare(Identity::EntropyBetaSlope, -beta * var, d_entropy)
    });
    // ∂<E>/∂β = -<ΔE²> and ∂²<E>/∂β² = κ₃, the third central moment.
    checks.push(compare(
        Identity::EntropyBetaCurvature,
        -var + beta * at.third_moment,
        diff(|s| s.entropy_slope),
    ));
    Ok(IdentityReport { beta, h, checks })
}
