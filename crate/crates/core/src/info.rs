//! Classical information measures over strategy distributions, in nats.
//!
//! Conventions: `0 ln 0 = 0`; a relative entropy whose reference puts zero
//! mass where the first argument does not is `+inf`, and the matching
//! confusion bound is `0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Negative components down to this are treated as rounding noise.
pub const NEGATIVE_NOISE: f64 = 1e-12;

fn check_distribution(what: &'static str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::invalid(what, "empty distribution"));
    }
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < -NEGATIVE_NOISE {
            return Err(Error::invalid(what, format!("component {i} = {v} is not a probability")));
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(what, format!("components sum to {sum}, expected 1")));
    }
    Ok(())
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// `H(x) = -Σ x_i ln x_i`.
pub fn shannon_entropy(x: &[f64]) -> Result<f64> {
    check_distribution("probability vector", x)?;
    Ok(-x.iter().map(|&v| plogp(v)).sum::<f64>())
}

/// Joint distribution `P(s_i^A, s_j^B)` of two players' strategies; rows
/// index player A, columns player B.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution(DMatrix<f64>);

impl JointDistribution {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("joint distribution", "empty matrix"));
        }
        for &v in p.iter() {
            if !v.is_finite() || v < -NEGATIVE_NOISE {
                return Err(Error::invalid("joint distribution", format!("entry {v} is not a probability")));
            }
        }
        let sum = p.sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("joint distribution", format!("entries sum to {sum}, expected 1")));
        }
        Ok(Self(p))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("joint distribution", "ragged rows"));
        }
        Self::new(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
    }

    /// Product distribution `p_i q_j`.
    pub fn product(p: &[f64], q: &[f64]) -> Result<Self> {
        check_distribution("marginal", p)?;
        check_distribution("marginal", q)?;
        Self::new(DMatrix::from_fn(p.len(), q.len(), |i, j| p[i] * q[j]))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Row marginal, the distribution of A.
    pub fn marginal_a(&self) -> Vec<f64> {
        self.0.row_iter().map(|r| r.sum()).collect()
    }

    /// Column marginal, the distribution of B.
    pub fn marginal_b(&self) -> Vec<f64> {
        self.0.column_iter().map(|c| c.sum()).collect()
    }
}

fn entropy_unchecked(p: impl IntoIterator<Item = f64>) -> f64 {
    -p.into_iter().map(plogp).sum::<f64>()
}

/// `H(A,B) = -Σ_ij P_ij ln P_ij`.
pub fn joint_entropy(p: &JointDistribution) -> f64 {
    entropy_unchecked(p.0.iter().copied())
}

/// `H(A|B) = H(A,B) - H(B)`.
pub fn conditional_entropy(p: &JointDistribution) -> f64 {
    joint_entropy(p) - entropy_unchecked(p.marginal_b())
}

/// `I(A:B) = H(A) + H(B) - H(A,B)`.
pub fn mutual_information(p: &JointDistribution) -> f64 {
    entropy_unchecked(p.marginal_a()) + entropy_unchecked(p.marginal_b()) - joint_entropy(p)
}

/// `D(p‖q) = Σ p_i ln(p_i / q_i)`, `+inf` when `q` misses part of the
/// support of `p`.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    Error::check_dim("relative_entropy", p.len(), q.len())?;
    check_distribution("probability vector", p)?;
    check_distribution("reference distribution", q)?;
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Ok(f64::INFINITY);
        }
        d += pi * (pi / qi).ln();
    }
    Ok(d.max(0.0))
}

/// Leading-order probability `exp(-N D(p‖q))` of mistaking `q` for `p`
/// after `repetitions` independent trials.
pub fn sanov_confusion_bound(p: &[f64], q: &[f64], repetitions: u64) -> Result<f64> {
    let d = relative_entropy(p, q)?;
    if repetitions == 0 {
        return Ok(1.0);
    }
    if d.is_infinite() {
        return Ok(0.0);
    }
    Ok((-(repetitions as f64) * d).exp())
}
