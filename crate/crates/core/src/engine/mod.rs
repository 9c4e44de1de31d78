//! Error probability of the ML receiver.
//!
//! The exact method integrates the decision regions over a truncated output
//! box. Each coordinate's box edge `K_i` is chosen so that its upper tail is at
//! most `epsilon / (2 n)`; by the union bound the mass outside the box is at
//! most `epsilon / 2` per hypothesis, which bounds the error of every reported
//! probability by `epsilon`.

mod enumerate;
mod gradient;
mod monte_carlo;

use serde::{Deserialize, Serialize};

use crate::channel::{intensities, Channel, CodePair, IntensityPair};
use crate::decoding::{decision_rule, Bit, DecisionRule};
use crate::error::{Error, Result};

pub use enumerate::truncation_limits;
pub use gradient::{d_vector, d_vector_intensities, directional_derivative, stationarity_coefficients};
pub use monte_carlo::mc_error;

pub const DEFAULT_EPSILON: f64 = 1e-10;
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Truncation tolerance and enumeration budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    epsilon: f64,
    budget: u128,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec {
            epsilon: DEFAULT_EPSILON,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl TruncationSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Precondition(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(TruncationSpec {
            epsilon,
            budget: DEFAULT_BUDGET,
        })
    }

    /// Maximum number of enumerated output states per hypothesis.
    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn budget(&self) -> u128 {
        self.budget
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactEnumeration,
    MonteCarlo,
}

/// Error probability of a code under equal priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub p_err: f64,
    pub p_err_given_1: f64,
    pub p_err_given_2: f64,
    /// Exact method: certified bound on `|reported - true|`.
    /// Monte Carlo: largest distance from the estimate to the Wilson 95% limits.
    pub truncation_bound: f64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    /// Largest probability, over the two hypotheses, of an output that ties.
    pub tie_mass: f64,
    /// Set when the tie mass exceeds the truncation tolerance.
    pub tie_flag: bool,
}

fn means(v: &[f64], d: f64) -> Vec<f64> {
    v.iter().map(|x| x + d).collect()
}

/// Exact error of the ML rule of `cp` over `ch`.
pub fn exact_error(cp: &CodePair, ch: &Channel, ts: &TruncationSpec) -> Result<ErrorEstimate> {
    exact_error_intensities(&intensities(cp, ch), ch.d(), ts)
}

/// Exact ML error as a function of the intensity pair alone.
pub fn exact_error_intensities(
    ip: &IntensityPair,
    d: f64,
    ts: &TruncationSpec,
) -> Result<ErrorEstimate> {
    let rule = decision_rule(ip, d)?;
    fixed_rule_estimate(ip, &rule, d, ts)
}

/// Per-hypothesis errors `(P(err | 1), P(err | 2))` when outputs follow `ip`
/// but `rule` (possibly built for another pair) is applied.
pub fn error_with_fixed_rule(
    ip: &IntensityPair,
    rule: &DecisionRule,
    d: f64,
    ts: &TruncationSpec,
) -> Result<(f64, f64)> {
    let e = fixed_rule_estimate(ip, rule, d, ts)?;
    Ok((e.p_err_given_1, e.p_err_given_2))
}

fn fixed_rule_estimate(
    ip: &IntensityPair,
    rule: &DecisionRule,
    d: f64,
    ts: &TruncationSpec,
) -> Result<ErrorEstimate> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidChannel(format!("dark noise must be positive, got {d}")));
    }
    let under_1 = enumerate::region_probability(
        rule,
        &means(&ip.lambda, d),
        Bit::Two,
        ts.epsilon,
        ts.budget,
        false,
    )?;
    let under_2 = enumerate::region_probability(
        rule,
        &means(&ip.mu, d),
        Bit::One,
        ts.epsilon,
        ts.budget,
        false,
    )?;
    let tie_mass = under_1.tie.max(under_2.tie);
    if tie_mass > ts.epsilon {
        log::debug!("tie mass {tie_mass:.3e} exceeds truncation tolerance");
    }
    Ok(ErrorEstimate {
        p_err: 0.5 * (under_1.prob + under_2.prob),
        p_err_given_1: under_1.prob,
        p_err_given_2: under_2.prob,
        truncation_bound: ts.epsilon,
        method: Method::ExactEnumeration,
        n_samples: None,
        seed: None,
        std_error: None,
        tie_mass,
        tie_flag: tie_mass > ts.epsilon,
    })
}
