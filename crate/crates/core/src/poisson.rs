//! Poisson pmf/tail tables evaluated in log space, and a seeded sampler.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

/// `ln P(Y = k)` for `Y ~ Poisson(mean)`, `mean > 0`.
pub fn ln_pmf(k: u64, mean: f64) -> f64 {
    let kf = k as f64;
    kf * mean.ln() - mean - ln_gamma(kf + 1.0)
}

pub fn pmf(k: u64, mean: f64) -> f64 {
    ln_pmf(k, mean).exp()
}

/// Index past which the upper tail is far below anything we resolve.
fn safe_table_end(mean: f64) -> usize {
    (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize
}

/// pmf values on `0..=end`, accurate for every entry (no recurrence drift).
fn pmf_table(mean: f64, end: usize) -> Vec<f64> {
    (0..=end as u64).map(|k| pmf(k, mean)).collect()
}

/// Upper tail `P(Y > k)`, summed from the far end so small tails keep their
/// relative accuracy.
pub fn upper_tail(k: u64, mean: f64) -> f64 {
    let end = safe_table_end(mean).max(k as usize + 1);
    let mut acc = 0.0;
    for j in ((k + 1)..=end as u64).rev() {
        acc += pmf(j, mean);
    }
    acc
}

/// Smallest `K` with `P(Y > K) <= tail`.
pub fn truncation_point(mean: f64, tail: f64) -> usize {
    let end = safe_table_end(mean);
    let p = pmf_table(mean, end);
    // sf[k] = P(Y > k) for k in 0..=end
    let mut sf = vec![0.0; end + 1];
    let mut acc = 0.0;
    for k in (0..end).rev() {
        acc += p[k + 1];
        sf[k] = acc;
    }
    sf.iter().position(|s| *s <= tail).unwrap_or(end)
}

/// pmf on `0..=limit` for one output slot.
#[derive(Debug, Clone)]
pub(crate) struct TruncatedPmf {
    pub mean: f64,
    pub pmf: Vec<f64>,
}

impl TruncatedPmf {
    pub fn new(mean: f64, limit: usize) -> Self {
        TruncatedPmf {
            mean,
            pmf: pmf_table(mean, limit),
        }
    }
}

/// pmf plus accurate cumulative and survival arrays over a table long enough
/// that the omitted tail is negligible at double precision.
#[derive(Debug, Clone)]
pub(crate) struct FullPmf {
    pub pmf: Vec<f64>,
    /// `cdf[k] = P(Y <= k)`
    pub cdf: Vec<f64>,
    /// `sf[k] = P(Y >= k)`
    pub sf: Vec<f64>,
}

impl FullPmf {
    pub fn new(mean: f64) -> Self {
        let end = safe_table_end(mean);
        let pmf = pmf_table(mean, end);
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for p in &pmf {
            acc += p;
            cdf.push(acc.min(1.0));
        }
        let mut sf = vec![0.0; pmf.len()];
        let mut acc = 0.0;
        for k in (0..pmf.len()).rev() {
            acc += pmf[k];
            sf[k] = acc.min(1.0);
        }
        FullPmf { pmf, cdf, sf }
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    /// `P(Y >= t)`
    pub fn at_least(&self, t: usize) -> f64 {
        if t == 0 {
            1.0
        } else {
            self.sf.get(t).copied().unwrap_or(0.0)
        }
    }

    /// `P(Y <= u)`; `None` stands for the empty event `Y <= -1`.
    pub fn at_most(&self, u: Option<usize>) -> f64 {
        match u {
            None => 0.0,
            Some(u) => self.cdf.get(u).copied().unwrap_or(1.0),
        }
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }
}

/// Draws one Poisson variate: inversion below mean 10, PTRS rejection above.
pub fn sample<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < 10.0 {
        sample_inversion(rng, mean)
    } else {
        sample_ptrs(rng, mean)
    }
}

fn sample_inversion<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            // u sits in the unresolvable tail
            break;
        }
        cdf = next;
    }
    k
}

// Hörmann's transformed rejection with squeeze.
fn sample_ptrs<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= -mean + k * loglam - ln_gamma(k + 1.0)
        {
            return k as u64;
        }
    }
}
