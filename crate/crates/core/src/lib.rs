//! Binary signalling over a discrete-time Poisson channel with memory.
//!
//! Two codewords of length `N` are convolved with the channel coefficients
//! `pi` and observed through independent Poisson counts with dark noise `d`.
//! The crate computes the maximum-likelihood error probability exactly (with a
//! certified truncation bound), its sensitivity to the intensities, analytic
//! bounds for on/off signalling, explicit code constructions, and a grid
//! optimizer over codeword pairs.

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod constructions;
pub mod decoding;
pub mod engine;
pub mod error;
pub mod majorization;
pub mod optimizer;
pub mod poisson;

pub use channel::{
    check_constraints, convolve, intensities, Channel, CodePair, Codeword, ConstraintReport,
    IntensityPair, PowerConstraints,
};
pub use decoding::{decision_rule, decode, Bit, DecisionRule};
pub use engine::{
    d_vector, d_vector_intensities, directional_derivative, error_with_fixed_rule, exact_error,
    exact_error_intensities, mc_error, stationarity_coefficients, truncation_limits,
    ErrorEstimate, Method, TruncationSpec,
};
pub use error::{Error, Result};
