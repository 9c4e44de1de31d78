//! Channels, codewords and power constraints.
//!
//! A channel with memory of order `K` is described by its coefficients
//! `pi[0..K]` and a dark-noise level `d`. A codeword of length `N` maps to an
//! intensity sequence of length `N + K - 1` by discrete convolution; the output
//! in slot `i` is Poisson with mean `intensity[i] + d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discrete Poisson channel with memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelSpec", into = "ChannelSpec")]
pub struct Channel {
    pi: Vec<f64>,
    d: f64,
}

#[derive(Serialize, Deserialize)]
struct ChannelSpec {
    pi: Vec<f64>,
    d: f64,
}

impl TryFrom<ChannelSpec> for Channel {
    type Error = Error;

    fn try_from(spec: ChannelSpec) -> Result<Self> {
        Channel::new(spec.pi, spec.d)
    }
}

impl From<Channel> for ChannelSpec {
    fn from(ch: Channel) -> Self {
        ChannelSpec { pi: ch.pi, d: ch.d }
    }
}

impl Channel {
    pub fn new(pi: Vec<f64>, d: f64) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::InvalidChannel("need at least one coefficient".into()));
        }
        if pi.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidChannel(
                "coefficients must be finite and non-negative".into(),
            ));
        }
        if pi.iter().all(|p| *p == 0.0) {
            return Err(Error::InvalidChannel("all coefficients are zero".into()));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidChannel(format!(
                "dark noise must be positive, got {d}"
            )));
        }
        let total: f64 = pi.iter().sum();
        if total > 1.0 + 1e-12 {
            log::warn!("channel coefficients sum to {total} > 1");
        }
        Ok(Channel { pi, d })
    }

    /// Memoryless unit-gain channel `pi = [1]`.
    pub fn memoryless(d: f64) -> Result<Self> {
        Channel::new(vec![1.0], d)
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Memory order `K`.
    pub fn memory(&self) -> usize {
        self.pi.len()
    }

    pub fn pi_sum(&self) -> f64 {
        self.pi.iter().sum()
    }

    /// Same coefficients, different dark noise.
    pub fn with_dark_noise(&self, d: f64) -> Result<Self> {
        Channel::new(self.pi.clone(), d)
    }
}

/// Non-negative input sequence of one message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Codeword(Vec<f64>);

impl TryFrom<Vec<f64>> for Codeword {
    type Error = Error;

    fn try_from(x: Vec<f64>) -> Result<Self> {
        Codeword::new(x)
    }
}

impl From<Codeword> for Vec<f64> {
    fn from(c: Codeword) -> Self {
        c.0
    }
}

impl Codeword {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidCodeword("empty codeword".into()));
        }
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidCodeword(
                "entries must be finite and non-negative".into(),
            ));
        }
        Ok(Codeword(x))
    }

    pub fn zeros(n: usize) -> Self {
        Codeword(vec![0.0; n.max(1)])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn power(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn peak(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

/// The two codewords of a one-bit code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CodePairSpec", into = "CodePairSpec")]
pub struct CodePair {
    x1: Codeword,
    x2: Codeword,
}

#[derive(Serialize, Deserialize)]
struct CodePairSpec {
    x1: Codeword,
    x2: Codeword,
}

impl TryFrom<CodePairSpec> for CodePair {
    type Error = Error;

    fn try_from(spec: CodePairSpec) -> Result<Self> {
        CodePair::new(spec.x1, spec.x2)
    }
}

impl From<CodePair> for CodePairSpec {
    fn from(cp: CodePair) -> Self {
        CodePairSpec { x1: cp.x1, x2: cp.x2 }
    }
}

impl CodePair {
    pub fn new(x1: Codeword, x2: Codeword) -> Result<Self> {
        if x1.len() != x2.len() {
            return Err(Error::LengthMismatch {
                expected: x1.len(),
                got: x2.len(),
            });
        }
        Ok(CodePair { x1, x2 })
    }

    /// Builds a pair from raw vectors, validating both.
    pub fn from_vecs(x1: Vec<f64>, x2: Vec<f64>) -> Result<Self> {
        CodePair::new(Codeword::new(x1)?, Codeword::new(x2)?)
    }

    pub fn x1(&self) -> &Codeword {
        &self.x1
    }

    pub fn x2(&self) -> &Codeword {
        &self.x2
    }

    /// Blocklength `N`.
    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    /// Same pair with the two messages exchanged.
    pub fn swapped(&self) -> CodePair {
        CodePair {
            x1: self.x2.clone(),
            x2: self.x1.clone(),
        }
    }

    /// `x1` followed by `x2`; the order used for lexicographic tie-breaking.
    pub fn flattened(&self) -> Vec<f64> {
        let mut v = self.x1.0.clone();
        v.extend_from_slice(&self.x2.0);
        v
    }
}

/// Total-power (`P`) and/or peak-power (`A`) budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConstraintSpec", into = "ConstraintSpec")]
pub struct PowerConstraints {
    total: Option<f64>,
    peak: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintSpec {
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    total: Option<f64>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    peak: Option<f64>,
}

impl TryFrom<ConstraintSpec> for PowerConstraints {
    type Error = Error;

    fn try_from(spec: ConstraintSpec) -> Result<Self> {
        PowerConstraints::new(spec.total, spec.peak)
    }
}

impl From<PowerConstraints> for ConstraintSpec {
    fn from(pc: PowerConstraints) -> Self {
        ConstraintSpec {
            total: pc.total,
            peak: pc.peak,
        }
    }
}

impl PowerConstraints {
    /// `P = 0` is accepted (it pins both codewords to zero); `A` must be positive.
    pub fn new(total: Option<f64>, peak: Option<f64>) -> Result<Self> {
        if total.is_none() && peak.is_none() {
            return Err(Error::InvalidConstraints(
                "at least one of P and A is required".into(),
            ));
        }
        if let Some(p) = total {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidConstraints(format!("P must be >= 0, got {p}")));
            }
        }
        if let Some(a) = peak {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidConstraints(format!("A must be > 0, got {a}")));
            }
        }
        Ok(PowerConstraints { total, peak })
    }

    pub fn total_power(p: f64) -> Result<Self> {
        PowerConstraints::new(Some(p), None)
    }

    pub fn peak_power(a: f64) -> Result<Self> {
        PowerConstraints::new(None, Some(a))
    }

    pub fn total(&self) -> Option<f64> {
        self.total
    }

    pub fn peak(&self) -> Option<f64> {
        self.peak
    }

    /// `beta = P / A` when both budgets are present.
    pub fn beta(&self) -> Option<f64> {
        match (self.total, self.peak) {
            (Some(p), Some(a)) => Some(p / a),
            _ => None,
        }
    }

    /// Largest admissible value of a single slot.
    pub fn slot_cap(&self) -> f64 {
        match (self.total, self.peak) {
            (Some(p), Some(a)) => p.min(a),
            (Some(p), None) => p,
            (None, Some(a)) => a,
            (None, None) => unreachable!("constructor requires one budget"),
        }
    }
}

/// Per-slot output intensities (without dark noise) under each message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityPair {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl IntensityPair {
    pub fn new(lambda: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if lambda.len() != mu.len() {
            return Err(Error::LengthMismatch {
                expected: lambda.len(),
                got: mu.len(),
            });
        }
        if lambda.iter().chain(&mu).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Precondition(
                "intensities must be finite and non-negative".into(),
            ));
        }
        Ok(IntensityPair { lambda, mu })
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn swapped(&self) -> IntensityPair {
        IntensityPair {
            lambda: self.mu.clone(),
            mu: self.lambda.clone(),
        }
    }
}

/// `out[i] = sum_j pi[j] * x[i - j]`, length `N + K - 1`.
pub fn convolve(x: &Codeword, ch: &Channel) -> Vec<f64> {
    convolve_slices(x.as_slice(), ch.pi())
}

pub(crate) fn convolve_slices(x: &[f64], pi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len() + pi.len() - 1];
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(x.len() - 1);
        let hi = i.min(pi.len() - 1);
        *o = (lo..=hi).map(|j| pi[j] * x[i - j]).sum();
    }
    out
}

pub fn intensities(cp: &CodePair, ch: &Channel) -> IntensityPair {
    IntensityPair {
        lambda: convolve(cp.x1(), ch),
        mu: convolve(cp.x2(), ch),
    }
}

/// Outcome of checking a code pair against power budgets.
///
/// Slacks are `budget - used` per codeword; a negative slack is the excess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub satisfied: bool,
    pub total_ok: Option<bool>,
    pub peak_ok: Option<bool>,
    pub total_slack: Option<[f64; 2]>,
    pub peak_slack: Option<[f64; 2]>,
}

pub fn check_constraints(cp: &CodePair, pc: &PowerConstraints) -> ConstraintReport {
    let total_slack = pc
        .total()
        .map(|p| [p - cp.x1().power(), p - cp.x2().power()]);
    let peak_slack = pc.peak().map(|a| [a - cp.x1().peak(), a - cp.x2().peak()]);
    let total_ok = total_slack.map(|s| s.iter().all(|v| *v >= 0.0));
    let peak_ok = peak_slack.map(|s| s.iter().all(|v| *v >= 0.0));
    ConstraintReport {
        satisfied: total_ok.unwrap_or(true) && peak_ok.unwrap_or(true),
        total_ok,
        peak_ok,
        total_slack,
        peak_slack,
    }
}

/// Like [`check_constraints`] but tolerant of rounding in constructed codes.
pub(crate) fn feasible_within(cp: &CodePair, pc: &PowerConstraints, tol: f64) -> bool {
    let r = check_constraints(cp, pc);
    let ok = |s: Option<[f64; 2]>| s.map_or(true, |s| s.iter().all(|v| *v >= -tol));
    ok(r.total_slack) && ok(r.peak_slack)
}
