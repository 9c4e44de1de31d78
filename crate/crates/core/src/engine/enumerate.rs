//! Truncated product-space enumeration of a linear decision region.
//!
//! Every coordinate with a non-zero weight except the last is enumerated up to
//! its truncation point; the last one is resolved in closed form from a long
//! cumulative table, so each outer state costs O(1). Coordinates whose weight
//! is zero do not influence the decision and are marginalised exactly.

use crate::decoding::{Bit, DecisionRule};
use crate::error::{Error, Result};
use crate::poisson::{self, FullPmf, TruncatedPmf};

/// Result of integrating one decision region under one product law.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    /// Probability of the region.
    pub prob: f64,
    /// Probability of outputs inside the tie band.
    pub tie: f64,
    /// `E[(Y_i / m_i - 1) 1[region]]` per coordinate, when requested.
    pub grad: Option<Vec<f64>>,
}

/// Smallest `K_i` per mean with `P(Poisson(m_i) > K_i) <= epsilon / (2 n)`.
pub fn truncation_limits(means: &[f64], epsilon: f64) -> Vec<usize> {
    let per = epsilon / (2.0 * means.len().max(1) as f64);
    means
        .iter()
        .map(|&m| poisson::truncation_point(m, per))
        .collect()
}

struct Axis {
    index: usize,
    coef: f64,
    table: TruncatedPmf,
}

struct LastAxis {
    index: usize,
    coef: f64,
    table: FullPmf,
}

struct Walker<'a> {
    rule: &'a DecisionRule,
    region: Bit,
    outer: Vec<Axis>,
    last: LastAxis,
    cut: f64,
}

struct Acc<'g> {
    tie: f64,
    grad: Option<&'g mut [f64]>,
}

impl Walker<'_> {
    fn walk(&self, level: usize, s: f64, w_above: f64, acc: &mut Acc) -> f64 {
        if level == self.outer.len() {
            return self.leaf(s, w_above, acc);
        }
        let ax = &self.outer[level];
        let mut total = 0.0;
        for (y, &p) in ax.table.pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let s2 = s + ax.coef * y as f64;
            let child = self.walk(level + 1, s2, w_above * p, acc);
            total += p * child;
            if let Some(g) = acc.grad.as_deref_mut() {
                g[ax.index] += w_above * p * (y as f64 / ax.table.mean - 1.0) * child;
            }
        }
        total
    }

    fn leaf(&self, s: f64, w: f64, acc: &mut Acc) -> f64 {
        let last = &self.last;
        let a = last.coef;
        let len = last.table.len();
        let decides_one = |y: usize| s + a * y as f64 >= self.cut;
        if a > 0.0 {
            // message 1 for y >= t
            let est = (self.cut - s) / a;
            let mut t = if est.is_nan() || est <= 0.0 {
                0
            } else if est >= len as f64 {
                len
            } else {
                est.ceil() as usize
            };
            while t > 0 && decides_one(t - 1) {
                t -= 1;
            }
            while t < len && !decides_one(t) {
                t += 1;
            }
            if t < len && self.rule.is_tie(s + a * t as f64) {
                acc.tie += w * last.table.mass(t);
            }
            let edge = if t == 0 { 0.0 } else { last.table.mass(t - 1) };
            match self.region {
                Bit::One => {
                    if let Some(g) = acc.grad.as_deref_mut() {
                        g[last.index] += w * edge;
                    }
                    last.table.at_least(t)
                }
                Bit::Two => {
                    if let Some(g) = acc.grad.as_deref_mut() {
                        g[last.index] -= w * edge;
                    }
                    last.table.at_most(t.checked_sub(1))
                }
            }
        } else {
            // a < 0: message 1 for y <= u
            let u = if !decides_one(0) {
                None
            } else {
                let est = (self.cut - s) / a;
                let mut u = if est.is_nan() || est <= 0.0 {
                    0
                } else if est >= (len - 1) as f64 {
                    len - 1
                } else {
                    est.floor() as usize
                };
                while u + 1 < len && decides_one(u + 1) {
                    u += 1;
                }
                while u > 0 && !decides_one(u) {
                    u -= 1;
                }
                Some(u)
            };
            let edge = match u {
                Some(u) => {
                    if self.rule.is_tie(s + a * u as f64) {
                        acc.tie += w * last.table.mass(u);
                    }
                    last.table.mass(u)
                }
                None => 0.0,
            };
            match self.region {
                Bit::One => {
                    if let Some(g) = acc.grad.as_deref_mut() {
                        g[last.index] -= w * edge;
                    }
                    last.table.at_most(u)
                }
                Bit::Two => {
                    if let Some(g) = acc.grad.as_deref_mut() {
                        g[last.index] += w * edge;
                    }
                    last.table.at_least(u.map_or(0, |u| u + 1))
                }
            }
        }
    }
}

/// Probability that the rule outputs `region` when `Y_i ~ Poisson(means[i])`
/// independently. `means` already include the dark noise.
pub(crate) fn region_probability(
    rule: &DecisionRule,
    means: &[f64],
    region: Bit,
    epsilon: f64,
    budget: u128,
    want_grad: bool,
) -> Result<Tally> {
    if means.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            got: means.len(),
        });
    }
    if means.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::Precondition("output means must be positive".into()));
    }
    let active: Vec<usize> = (0..rule.len())
        .filter(|&i| rule.weights()[i] != 0.0)
        .collect();
    let mut grad = want_grad.then(|| vec![0.0; rule.len()]);

    let Some((&last_idx, outer_idx)) = active.split_last() else {
        // decision does not depend on the output
        let hit = rule.decide_score(0.0) == region;
        return Ok(Tally {
            prob: if hit { 1.0 } else { 0.0 },
            tie: if rule.is_tie(0.0) { 1.0 } else { 0.0 },
            grad,
        });
    };

    let outer_means: Vec<f64> = outer_idx.iter().map(|&i| means[i]).collect();
    let limits = truncation_limits(&outer_means, epsilon);
    let states = limits
        .iter()
        .fold(1u128, |acc, k| acc.saturating_mul(*k as u128 + 1));
    if states > budget {
        return Err(Error::BudgetExceeded { states, budget });
    }

    let outer = outer_idx
        .iter()
        .zip(&limits)
        .map(|(&i, &k)| Axis {
            index: i,
            coef: rule.weights()[i],
            table: TruncatedPmf::new(means[i], k),
        })
        .collect();
    let walker = Walker {
        rule,
        region,
        outer,
        last: LastAxis {
            index: last_idx,
            coef: rule.weights()[last_idx],
            table: FullPmf::new(means[last_idx]),
        },
        cut: rule.cutoff(),
    };
    let mut acc = Acc {
        tie: 0.0,
        grad: grad.as_deref_mut(),
    };
    let prob = walker.walk(0, 0.0, 1.0, &mut acc);
    let tie = acc.tie;
    Ok(Tally {
        prob: prob.clamp(0.0, 1.0),
        tie,
        grad,
    })
}
