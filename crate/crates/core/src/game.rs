//! Symmetric two-player games: payoffs, fitness, and certification of Nash
//! equilibria and evolutionarily stable strategies.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default tolerance used by every certification routine.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Strategy weights whose sum misses 1 by at most this much are renormalized
/// instead of rejected.
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// Payoff matrix `a_ij` of a finite symmetric game: the payoff to the row
/// strategy `i` against the column strategy `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    entries: DMatrix<f64>,
}

impl PayoffMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 {
            return Err(Error::invalid("payoff matrix", "needs at least one strategy"));
        }
        if entries.nrows() != entries.ncols() {
            return Err(Error::invalid(
                "payoff matrix",
                format!("must be square, got {}x{}", entries.nrows(), entries.ncols()),
            ));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("payoff matrix", format!("non-finite entry {bad}")));
        }
        Ok(Self { entries })
    }

    /// Builds a matrix from row-major rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(
                    "payoff matrix",
                    format!("row {i} has {} entries, expected {n}", row.len()),
                ));
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// Stable 64-bit FNV-1a digest of the dimension and entry bit patterns.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |word: u64| {
            for byte in word.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(self.dim() as u64);
        for row in self.entries.row_iter() {
            for v in row.iter() {
                feed(v.to_bits());
            }
        }
        h
    }
}

/// A point of the probability simplex: population frequencies `x_i`, or a
/// player's mixed strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    weights: DVector<f64>,
}

impl MixedStrategy {
    /// Validates the weights. Negative entries are rejected, a sum within
    /// [`RENORMALIZE_TOL`] of one is rescaled, and anything further off is an
    /// error.
    pub fn new(weights: impl Into<Vec<f64>>) -> Result<Self> {
        let weights: Vec<f64> = weights.into();
        if weights.is_empty() {
            return Err(Error::invalid("strategy", "needs at least one weight"));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::invalid("strategy", format!("weight {i} is not finite")));
            }
            if w < 0.0 {
                return Err(Error::invalid("strategy", format!("weight {i} = {w} is negative")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::invalid(
                "strategy",
                format!("weights sum to {sum}, expected 1"),
            ));
        }
        let weights = DVector::from_iterator(weights.len(), weights.into_iter().map(|w| w / sum));
        Ok(Self { weights })
    }

    /// The pure strategy `e_index` among `n`.
    pub fn pure(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::invalid(
                "strategy",
                format!("pure index {index} out of range for {n} strategies"),
            ));
        }
        Ok(Self {
            weights: DVector::from_fn(n, |i, _| if i == index { 1.0 } else { 0.0 }),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("strategy", "needs at least one weight"));
        }
        Ok(Self {
            weights: DVector::from_element(n, 1.0 / n as f64),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.weights.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.weights.iter().copied().collect()
    }

    /// Index of the single strategy carrying all the weight, if any.
    pub fn pure_index(&self) -> Option<usize> {
        let mut support = self.weights.iter().enumerate().filter(|(_, &w)| w > 0.0);
        match (support.next(), support.next()) {
            (Some((i, &w)), None) if (w - 1.0).abs() <= RENORMALIZE_TOL => Some(i),
            _ => None,
        }
    }

    /// Indices with positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Nash,
    StrictNash,
    Ess,
    None,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Nash => "nash",
            Verdict::StrictNash => "strict-nash",
            Verdict::Ess => "ess",
            Verdict::None => "none",
        }
    }

    /// True for every verdict that certifies at least a Nash equilibrium.
    pub fn is_equilibrium(self) -> bool {
        !matches!(self, Verdict::None)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `E(r,p) > E(p,p) + tol`: the pure reply beats `p` against itself.
    BetterReply,
    /// An alternative best reply; for ESS checks the second condition held.
    Tie,
    /// An alternative best reply for which `E(p,r) > E(r,r)` failed.
    Invader,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub strategy: usize,
    pub kind: WitnessKind,
    /// `E(r,p) - E(p,p)` for better replies and plain ties, and
    /// `E(p,r) - E(r,r)` once the second ESS condition has been evaluated.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub verdict: Verdict,
    /// `max_r E(r,p) - E(p,p)` over pure `r`.
    pub worst_deviation: f64,
    pub witnesses: Vec<Witness>,
}

fn check_strategy(context: &'static str, a: &PayoffMatrix, s: &MixedStrategy) -> Result<()> {
    Error::check_dim(context, a.dim(), s.len())
}

fn check_tol(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("tolerance", format!("{tol} must be finite and >= 0")))
    }
}

/// Bilinear payoff `E(p,q) = Σ_ij p_i a_ij q_j`.
pub fn expected_payoff(p: &MixedStrategy, q: &MixedStrategy, a: &PayoffMatrix) -> Result<f64> {
    check_strategy("expected_payoff (p)", a, p)?;
    check_strategy("expected_payoff (q)", a, q)?;
    Ok(p.as_vector().dot(&(a.matrix() * q.as_vector())))
}

/// Fitness vector `f_i = Σ_j a_ij x_j`.
pub fn fitness(x: &MixedStrategy, a: &PayoffMatrix) -> Result<DVector<f64>> {
    check_strategy("fitness", a, x)?;
    Ok(a.matrix() * x.as_vector())
}

/// Mean population fitness `Σ_kl a_kl x_k x_l`.
pub fn average_fitness(x: &MixedStrategy, a: &PayoffMatrix) -> Result<f64> {
    expected_payoff(x, x, a)
}

/// `E(e_r,p) - E(p,p)` for every pure reply `r`.
fn deviations(p: &MixedStrategy, a: &PayoffMatrix) -> Vec<f64> {
    let f = a.matrix() * p.as_vector();
    let own = p.as_vector().dot(&f);
    f.iter().map(|fr| fr - own).collect()
}

/// Checks `E(p,p) >= E(r,p)` against every pure reply `r`; by bilinearity
/// this covers mixed replies as well.
///
/// A strict equilibrium requires `p` to be pure and every other pure reply
/// to fall short by more than `tol`.
pub fn certify_nash(p: &MixedStrategy, a: &PayoffMatrix, tol: f64) -> Result<EquilibriumReport> {
    check_strategy("certify_nash", a, p)?;
    check_tol(tol)?;
    let dev = deviations(p, a);
    let own_index = p.pure_index();

    let mut witnesses = Vec::new();
    let mut nash = true;
    for (r, &d) in dev.iter().enumerate() {
        if Some(r) == own_index {
            continue;
        }
        if d > tol {
            nash = false;
            witnesses.push(Witness {
                strategy: r,
                kind: WitnessKind::BetterReply,
                margin: d,
            });
        } else if d >= -tol {
            witnesses.push(Witness {
                strategy: r,
                kind: WitnessKind::Tie,
                margin: d,
            });
        }
    }
    let verdict = if !nash {
        Verdict::None
    } else if own_index.is_some() && witnesses.is_empty() {
        Verdict::StrictNash
    } else {
        Verdict::Nash
    };
    let worst_deviation = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(EquilibriumReport {
        verdict,
        worst_deviation,
        witnesses,
    })
}

/// Evolutionary stability screened against pure mutants.
///
/// The first condition is the Nash test above. Every pure reply tying with
/// `p` within `tol` must then satisfy `E(p,r) > E(r,r) + tol`. Only pure
/// tying mutants are examined: this is exact for two strategies and a sound
/// but incomplete certificate beyond that, so the tying witnesses are kept
/// in the report.
///
/// The verdict is [`Verdict::Ess`] when both conditions hold and otherwise
/// falls back to the Nash verdict (`Nash` or `None`).
pub fn certify_ess(p: &MixedStrategy, a: &PayoffMatrix, tol: f64) -> Result<EquilibriumReport> {
    let mut report = certify_nash(p, a, tol)?;
    if report.verdict == Verdict::None {
        return Ok(report);
    }
    // E(p, e_r) is the r-th entry of Aᵀp.
    let against_mutant = a.matrix().transpose() * p.as_vector();
    let mut stable = true;
    for w in report.witnesses.iter_mut() {
        debug_assert_eq!(w.kind, WitnessKind::Tie);
        let r = w.strategy;
        let margin = against_mutant[r] - a.entry(r, r);
        w.margin = margin;
        if margin <= tol {
            w.kind = WitnessKind::Invader;
            stable = false;
        }
    }
    if stable {
        report.verdict = Verdict::Ess;
    }
    Ok(report)
}
