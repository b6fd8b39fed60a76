//! Information-theoretic quantities: the closed-form information curves and
//! a small discrete mutual-information toolkit.
//!
//! All logarithms are base 2, so every quantity is measured in bits, and
//! the convention 0·log₂0 = 0 applies throughout.
//!
//! The three curves at the heart of the analysis, as functions of the
//! disturbance D (the error rate Bob sees):
//!
//! * [`i_ab`] — what Alice and Bob share through the binary symmetric
//!   channel the attack leaves them: 1 + D log₂ D + (1−D) log₂(1−D);
//! * [`i_ae_two_bit`] — the eavesdropper's information when she reads her
//!   optimal four-dimensional probe with the best two-bit measurement;
//! * [`i_ae_one_bit`] — her information when the probe is restricted to a
//!   single auxiliary qubit read out by the best binary measurement.
//!
//! The two-bit curve dominates the one-bit curve strictly between the
//! endpoints D = 0 and D = 1/2, and crosses [`i_ab`] at the disturbance
//! where privacy amplification against this attack stops being possible.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// x·log₂x with the continuous-extension convention 0·log₂0 = 0.
///
/// Negative inputs (which can only arise from rounding) are treated as 0.
fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// The binary entropy h(p) = −p log₂ p − (1−p) log₂(1−p).
///
/// Returns NaN outside [0, 1].
pub fn binary_entropy(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    -xlog2(p) - xlog2(1.0 - p)
}

/// The two-argument entropy-like combination
/// τ(x, y) = x log₂ x + y log₂ y − (x+y) log₂(x+y).
///
/// It is homogeneous of degree one — τ(λx, λy) = λ·τ(x, y) — which is what
/// makes conditional information expressions collapse to a common overall
/// factor.  Inputs must be nonnegative; τ ≤ 0 always, with τ(x, 0) = 0 and
/// τ(x, x) = −2x.
pub fn tau(x: f64, y: f64) -> f64 {
    xlog2(x) + xlog2(y) - xlog2(x + y)
}

fn check_unit_interval(name: &'static str, value: f64, max: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=max).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max,
        });
    }
    Ok(())
}

/// Mutual information between Alice and Bob at disturbance `d`:
/// 1 + d log₂ d + (1−d) log₂(1−d), i.e. one minus the binary entropy of the
/// error rate.
///
/// Valid for d ∈ [0, 1]; equals 1 at d = 0 and 0 at d = 1/2.
pub fn i_ab(d: f64) -> Result<f64> {
    check_unit_interval("d", d, 1.0)?;
    Ok(1.0 - binary_entropy(d))
}

/// Conditional fidelity of the optimal two-bit probe: the probability that
/// the probe's second bit identifies Alice's bit correctly, given the
/// first bit flagged "no error".
fn two_bit_fidelity(d: f64) -> f64 {
    if d == 0.0 {
        return 0.5;
    }
    0.5 * (1.0 + (d * (2.0 - 3.0 * d)).sqrt() / (1.0 - d))
}

/// Overall success probability of the optimal single-qubit probe readout.
fn one_bit_fidelity(d: f64) -> f64 {
    0.5 * (1.0 + d + (d * (2.0 - 3.0 * d)).sqrt())
}

/// The eavesdropper's information at disturbance `d` for the optimal
/// probe read out with two classical bits:
/// 1 − (1−d)·h(f) with f = ½(1 + √(d(2−3d))/(1−d)).
///
/// Valid for d ∈ [0, 1/2]; rises from 0 at d = 0 to 1 at d = 1/2.
pub fn i_ae_two_bit(d: f64) -> Result<f64> {
    check_unit_interval("d", d, 0.5)?;
    let f = two_bit_fidelity(d);
    Ok(1.0 - (1.0 - d) * binary_entropy(f))
}

/// The eavesdropper's information at disturbance `d` when her probe is a
/// single qubit read out with one classical bit: 1 − h(f₁) with
/// f₁ = ½(1 + d + √(d(2−3d))).
///
/// Valid for d ∈ [0, 1/2]; strictly below [`i_ae_two_bit`] except at the
/// endpoints.
pub fn i_ae_one_bit(d: f64) -> Result<f64> {
    check_unit_interval("d", d, 0.5)?;
    Ok(1.0 - binary_entropy(one_bit_fidelity(d)))
}

/// A joint probability distribution over two finite alphabets.
///
/// Entries are nonnegative and sum to one; the constructor accepts inputs
/// within `1e-9` of normalization and renormalizes exactly.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    probs: DMatrix<f64>,
}

impl JointDistribution {
    /// Builds a distribution from a rectangular table of probabilities,
    /// rows indexing the first variable.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidProbability("empty table".into()));
        }
        let ncols = rows[0].len();
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidProbability(
                "rows have unequal lengths".into(),
            ));
        }
        let mut mat = DMatrix::zeros(rows.len(), ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < -1e-12 {
                    return Err(Error::InvalidProbability(format!(
                        "entry ({i}, {j}) = {p}"
                    )));
                }
                mat[(i, j)] = p.max(0.0);
            }
        }
        let total = mat.sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbability(format!(
                "entries sum to {total}, expected 1"
            )));
        }
        mat /= total;
        Ok(Self { probs: mat })
    }

    /// Builds the empirical distribution of a table of counts.
    pub fn from_counts(counts: &[Vec<u64>]) -> Result<Self> {
        let total: u64 = counts.iter().flatten().sum();
        if total == 0 {
            return Err(Error::InvalidProbability("all counts are zero".into()));
        }
        let rows = counts
            .iter()
            .map(|r| r.iter().map(|&c| c as f64 / total as f64).collect())
            .collect();
        Self::new(rows)
    }

    /// Table shape as (rows, columns).
    pub fn shape(&self) -> (usize, usize) {
        (self.probs.nrows(), self.probs.ncols())
    }

    /// Probability of the cell (row, column).
    pub fn prob(&self, row: usize, col: usize) -> f64 {
        self.probs[(row, col)]
    }

    /// Marginal distribution of the row variable.
    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.probs.nrows())
            .map(|i| self.probs.row(i).sum())
            .collect()
    }

    /// Marginal distribution of the column variable.
    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.probs.ncols())
            .map(|j| self.probs.column(j).sum())
            .collect()
    }
}

/// Mutual information of a joint distribution, in bits:
/// Σ p(x,y) log₂[ p(x,y) / (p(x)p(y)) ], with zero cells contributing zero.
///
/// Always in [0, min(log₂ rows, log₂ columns)]; clamped at 0 against
/// rounding.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let px = j.row_marginal();
    let py = j.col_marginal();
    let (nx, ny) = j.shape();
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let p = j.prob(x, y);
            if p > 0.0 {
                total += p * (p / (px[x] * py[y])).log2();
            }
        }
    }
    total.max(0.0)
}
