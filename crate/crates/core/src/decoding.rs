//! Maximum-likelihood decision rule for a pair of Poisson intensity vectors.
//!
//! With equal priors the likelihood ratio test reduces to a weighted sum of the
//! received counts compared against a threshold: decide message 1 iff
//! `sum_i a_i y_i >= b`, where `a_i = ln(lambda_i + d) - ln(mu_i + d)` and
//! `b = sum_i (lambda_i - mu_i)`.

use serde::{Deserialize, Serialize};

use crate::channel::IntensityPair;
use crate::error::{Error, Result};

/// Relative width of the band around `b` that counts as a tie.
///
/// Symmetric codes produce exact likelihood ties whose weighted sums differ
/// from `b` only by rounding, so equality is tested with this band.
pub const TIE_RELATIVE: f64 = 1e-9;

/// Decoded message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bit {
    One,
    Two,
}

impl Bit {
    pub fn as_u8(self) -> u8 {
        match self {
            Bit::One => 1,
            Bit::Two => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRule {
    a: Vec<f64>,
    b: f64,
    tie_tol: f64,
}

impl DecisionRule {
    /// A rule from explicit weights and threshold.
    pub fn from_parts(a: Vec<f64>, b: f64) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::Precondition("rule weights must be finite".into()));
        }
        let scale = 1.0 + b.abs() + a.iter().map(|v| v.abs()).sum::<f64>();
        Ok(DecisionRule {
            a,
            b,
            tie_tol: TIE_RELATIVE * scale,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn threshold(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn tie_tolerance(&self) -> f64 {
        self.tie_tol
    }

    /// Scores at or above this value decode to message 1.
    pub(crate) fn cutoff(&self) -> f64 {
        self.b - self.tie_tol
    }

    /// Indices with `a_i >= 0`, i.e. `lambda_i >= mu_i`.
    pub fn set_a(&self) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| self.a[i] >= 0.0).collect()
    }

    /// Weighted sum `sum_i a_i y_i`, accumulated in index order.
    pub fn score(&self, y: &[u64]) -> Result<f64> {
        if y.len() != self.a.len() {
            return Err(Error::LengthMismatch {
                expected: self.a.len(),
                got: y.len(),
            });
        }
        Ok(self.score_unchecked(y))
    }

    pub(crate) fn score_unchecked(&self, y: &[u64]) -> f64 {
        let mut s = 0.0;
        for (a, &y) in self.a.iter().zip(y) {
            if *a != 0.0 {
                s += a * y as f64;
            }
        }
        s
    }

    pub(crate) fn decide_score(&self, score: f64) -> Bit {
        if score >= self.cutoff() {
            Bit::One
        } else {
            Bit::Two
        }
    }

    /// Is this score inside the tie band around `b`?
    pub(crate) fn is_tie(&self, score: f64) -> bool {
        (score - self.b).abs() <= self.tie_tol
    }

    /// Negated weights and threshold: the rule for the swapped pair.
    pub fn negated(&self) -> DecisionRule {
        DecisionRule {
            a: self.a.iter().map(|v| -v).collect(),
            b: -self.b,
            tie_tol: self.tie_tol,
        }
    }
}

/// Builds the ML rule for `ip` at dark noise `d`.
pub fn decision_rule(ip: &IntensityPair, d: f64) -> Result<DecisionRule> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidChannel(format!(
            "dark noise must be positive, got {d}"
        )));
    }
    // Difference of logs keeps a_i exactly antisymmetric under swapping and
    // exactly zero when lambda_i == mu_i.
    let a = ip
        .lambda
        .iter()
        .zip(&ip.mu)
        .map(|(l, m)| (l + d).ln() - (m + d).ln())
        .collect();
    let b = ip.lambda.iter().zip(&ip.mu).map(|(l, m)| l - m).sum();
    DecisionRule::from_parts(a, b)
}

/// Decodes an output vector. Ties go to message 1.
pub fn decode(rule: &DecisionRule, y: &[u64]) -> Result<Bit> {
    Ok(rule.decide_score(rule.score(y)?))
}
