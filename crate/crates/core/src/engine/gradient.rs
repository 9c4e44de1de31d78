//! First-order sensitivity of the message-1 error at a fixed decision rule.
//!
//! `D_i = E[(Y_i / (lambda_i + d) - 1) 1[sum_j a_j Y_j < b]]` with
//! `Y ~ Poisson(lambda + d)`. This is the derivative of `P(err | 1)` with
//! respect to `lambda_i`; the average error carries an extra factor of 1/2,
//! which is left out here.

use super::{enumerate, means, TruncationSpec};
use crate::channel::{intensities, Channel, CodePair, IntensityPair};
use crate::decoding::{decision_rule, Bit};
use crate::error::{Error, Result};

/// `D_i` for every output slot of `cp` over `ch`.
pub fn d_vector(cp: &CodePair, ch: &Channel, ts: &TruncationSpec) -> Result<Vec<f64>> {
    d_vector_intensities(&intensities(cp, ch), ch.d(), ts)
}

pub fn d_vector_intensities(ip: &IntensityPair, d: f64, ts: &TruncationSpec) -> Result<Vec<f64>> {
    let rule = decision_rule(ip, d)?;
    let tally = enumerate::region_probability(
        &rule,
        &means(&ip.lambda, d),
        Bit::Two,
        ts.epsilon(),
        ts.budget(),
        true,
    )?;
    Ok(tally.grad.expect("gradient requested"))
}

/// `c_j = sum_i D_{j+i} pi_i` for `j` in `0..N`: the derivative along a unit
/// change of input slot `j`.
pub fn stationarity_coefficients(d_vec: &[f64], ch: &Channel) -> Result<Vec<f64>> {
    let k = ch.memory();
    if d_vec.len() < k {
        return Err(Error::LengthMismatch {
            expected: k,
            got: d_vec.len(),
        });
    }
    let n = d_vec.len() + 1 - k;
    Ok((0..n)
        .map(|j| ch.pi().iter().enumerate().map(|(i, p)| d_vec[j + i] * p).sum())
        .collect())
}

/// `sum_i D_i zeta_i` with `zeta = s * pi`, the derivative along input
/// direction `s`.
pub fn directional_derivative(d_vec: &[f64], s: &[f64], ch: &Channel) -> Result<f64> {
    let expected = s.len() + ch.memory() - 1;
    if d_vec.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: d_vec.len(),
        });
    }
    let c = stationarity_coefficients(d_vec, ch)?;
    Ok(s.iter().zip(&c).map(|(s, c)| s * c).sum())
}
