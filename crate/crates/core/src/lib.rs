//! Evolutionary game dynamics and their quantum-statistical counterparts.
//!
//! * [`game`]: payoffs, Nash and ESS certification.
//! * [`replicator`]: the vector replicator equation, rest points, and the
//!   Shannon-entropy rate along its flow.
//! * [`lax`]: the matrix form `dX/dt = [Λ, X]` on `x_ij = sqrt(x_i x_j)`.
//! * [`quantum`]: density operators, the quantization `X → ρ`,
//!   `Λ → -(i/ħ)H`, von Neumann evolution and entropy.
//! * [`info`]: Shannon, joint, conditional, mutual and relative entropy.
//! * [`maxent`]: Gibbs distributions and thermodynamic identities.

pub mod error;
pub mod game;
pub mod info;
pub mod lax;
mod linalg;
pub mod maxent;
pub mod ode;
pub mod quantum;
pub mod replicator;

pub use error::{Error, Result};
pub use game::{
    average_fitness, certify_ess, certify_nash, expected_payoff, fitness, EquilibriumReport,
    MixedStrategy, PayoffMatrix, Verdict, Witness, WitnessKind, DEFAULT_TOL,
};
pub use info::{
    conditional_entropy, joint_entropy, mutual_information, relative_entropy,
    sanov_confusion_bound, shannon_entropy, JointDistribution,
};
pub use lax::{
    freq_matrix, freq_series, g_sym, integrate_matrix, lambda_matrix, lax_rhs, q_matrix,
    FreqMatrix, LambdaMatrix, MatrixTrajectory,
};
pub use maxent::{
    gibbs_distribution, maxent_distribution_unconstrained, solve_beta, thermo_state,
    verify_identities, EnergySpectrum, Identity, IdentityCheck, IdentityOutcome, IdentityReport,
    ThermoState,
};
pub use ode::{IntegratorConfig, Method};
pub use quantum::{
    density_from_ensemble, evolve, exact_entropy_rate, hamiltonian_from_lambda, quantize,
    spectral_entropy, vn_entropy_rate_series, von_neumann_entropy, von_neumann_rhs, CMatrix,
    Complex64, DensityOperator, DensityTrajectory, Hamiltonian, HamiltonianSource,
};
pub use replicator::{
    find_fixed_points, integrate, replicator_rhs, shannon_rate, FixedPoint, FixedPointScan,
    Trajectory,
};

pub use nalgebra;
