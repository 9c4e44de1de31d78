use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ErrorEstimate, Method};
use crate::channel::{intensities, Channel, CodePair};
use crate::decoding::{decision_rule, Bit};
use crate::error::{Error, Result};
use crate::poisson;

const Z95: f64 = 1.959_963_984_540_054;

/// Monte Carlo estimate of the ML error: one output vector per hypothesis per
/// trial, generator seeded from `seed` only.
pub fn mc_error(cp: &CodePair, ch: &Channel, n_samples: u64, seed: u64) -> Result<ErrorEstimate> {
    if n_samples == 0 {
        return Err(Error::Precondition("n_samples must be at least 1".into()));
    }
    let ip = intensities(cp, ch);
    let rule = decision_rule(&ip, ch.d())?;
    let m1: Vec<f64> = ip.lambda.iter().map(|l| l + ch.d()).collect();
    let m2: Vec<f64> = ip.mu.iter().map(|m| m + ch.d()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = vec![0u64; m1.len()];
    let (mut err1, mut err2) = (0u64, 0u64);
    let mut ties = 0u64;
    for _ in 0..n_samples {
        for (yi, m) in y.iter_mut().zip(&m1) {
            *yi = poisson::sample(&mut rng, *m);
        }
        let s = rule.score_unchecked(&y);
        ties += rule.is_tie(s) as u64;
        if rule.decide_score(s) == Bit::Two {
            err1 += 1;
        }
        for (yi, m) in y.iter_mut().zip(&m2) {
            *yi = poisson::sample(&mut rng, *m);
        }
        if rule.decide_score(rule.score_unchecked(&y)) == Bit::One {
            err2 += 1;
        }
    }
    let n = n_samples as f64;
    let p1 = err1 as f64 / n;
    let p2 = err2 as f64 / n;
    let p = 0.5 * (p1 + p2);
    let se = 0.5 * ((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / n).sqrt();
    let tie_mass = ties as f64 / n;
    Ok(ErrorEstimate {
        p_err: p,
        p_err_given_1: p1,
        p_err_given_2: p2,
        truncation_bound: wilson_reach(p, 2.0 * n),
        method: Method::MonteCarlo,
        n_samples: Some(n_samples),
        seed: Some(seed),
        std_error: Some(se),
        tie_mass,
        tie_flag: tie_mass > 0.0,
    })
}

/// Largest distance from `p` to the Wilson 95% limits of `p` over `n` trials.
fn wilson_reach(p: f64, n: f64) -> f64 {
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (center + half - p).abs().max((center - half - p).abs())
}
