//! Majorization predicates and Robin Hood / Anti-Robin Hood transfers.
//!
//! Sequences are plain non-negative slices. Comparisons use a relative
//! tolerance of [`REL_TOL`] scaled by the larger total.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REL_TOL: f64 = 1e-12;

/// Transfer of `eps` between positions `i` and `j`.
///
/// Robin Hood moves `eps` from the larger entry `i` to the smaller `j`;
/// Anti-Robin Hood moves it from `j` to `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AROp {
    pub i: usize,
    pub j: usize,
    pub eps: f64,
}

impl AROp {
    pub fn new(i: usize, j: usize, eps: f64) -> Result<Self> {
        if i == j {
            return Err(Error::Precondition("transfer needs two distinct indices".into()));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Precondition(format!("transfer amount must be positive, got {eps}")));
        }
        Ok(AROp { i, j, eps })
    }
}

fn check_seq(s: &[f64]) -> Result<()> {
    if s.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Precondition("sequence entries must be finite and non-negative".into()));
    }
    Ok(())
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn tolerance(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().sum::<f64>().max(b.iter().sum::<f64>()).max(1.0);
    REL_TOL * scale
}

/// `b ≺_w a`: every descending prefix sum of `a` is at least that of `b`.
pub fn weak_majorizes(a: &[f64], b: &[f64]) -> Result<bool> {
    check_lengths(a, b)?;
    let tol = tolerance(a, b);
    let (sa, sb) = (sorted_desc(a), sorted_desc(b));
    let (mut pa, mut pb) = (0.0, 0.0);
    for (x, y) in sa.iter().zip(&sb) {
        pa += x;
        pb += y;
        if pa < pb - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `b ≺ a`: weak majorization with equal totals.
pub fn majorizes(a: &[f64], b: &[f64]) -> Result<bool> {
    let tol = tolerance(a, b);
    Ok(weak_majorizes(a, b)?
        && (a.iter().sum::<f64>() - b.iter().sum::<f64>()).abs() <= tol)
}

fn check_op(s: &[f64], op: &AROp) -> Result<()> {
    check_seq(s)?;
    AROp::new(op.i, op.j, op.eps)?;
    if op.i >= s.len() || op.j >= s.len() {
        return Err(Error::Precondition(format!(
            "indices ({}, {}) out of range for length {}",
            op.i,
            op.j,
            s.len()
        )));
    }
    Ok(())
}

/// Moves `eps` from `s_i` to `s_j`. Requires `s_i > s_j` and
/// `0 < eps < s_i - s_j`.
pub fn robin_hood(s: &[f64], op: AROp) -> Result<Vec<f64>> {
    check_op(s, &op)?;
    let (si, sj) = (s[op.i], s[op.j]);
    if !(si > sj && op.eps < si - sj) {
        return Err(Error::Precondition(format!(
            "robin hood needs s_i > s_j and eps < s_i - s_j (s_i={si}, s_j={sj}, eps={})",
            op.eps
        )));
    }
    let mut out = s.to_vec();
    out[op.i] -= op.eps;
    out[op.j] += op.eps;
    Ok(out)
}

/// Moves `eps` from `s_j` to `s_i`. Requires `s_i >= s_j` and
/// `0 < eps <= s_j`; equal entries are allowed so that an even split can be
/// spread apart.
pub fn anti_robin_hood(s: &[f64], op: AROp) -> Result<Vec<f64>> {
    check_op(s, &op)?;
    let (si, sj) = (s[op.i], s[op.j]);
    if !(si >= sj && op.eps <= sj) {
        return Err(Error::Precondition(format!(
            "anti robin hood needs s_i >= s_j and eps <= s_j (s_i={si}, s_j={sj}, eps={})",
            op.eps
        )));
    }
    let mut out = s.to_vec();
    out[op.i] += op.eps;
    out[op.j] = (sj - op.eps).max(0.0);
    Ok(out)
}

/// Anti-Robin Hood operations taking `from` to `to`, at most `len - 1` of them.
///
/// Requires `to` to majorize `from` and the two sequences to be similarly
/// ordered: some common permutation sorts both in descending order. Indices in
/// the returned ops refer to positions of `from`.
pub fn ar_path(from: &[f64], to: &[f64]) -> Result<Vec<AROp>> {
    check_lengths(from, to)?;
    check_seq(from)?;
    check_seq(to)?;
    if !majorizes(to, from)? {
        return Err(Error::Precondition("`to` does not majorize `from`".into()));
    }
    let n = from.len();
    let tol = tolerance(from, to);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| from[q].total_cmp(&from[p]).then(to[q].total_cmp(&to[p])));
    let x: Vec<f64> = order.iter().map(|&k| from[k]).collect();
    let mut y: Vec<f64> = order.iter().map(|&k| to[k]).collect();
    if y.windows(2).any(|w| w[1] > w[0] + tol) {
        return Err(Error::Precondition(
            "`from` and `to` are not similarly ordered".into(),
        ));
    }

    // Robin Hood steps from `to` down to `from`; each one makes at least one
    // more coordinate agree, and reversing them gives the AR path.
    let mut steps = Vec::new();
    loop {
        let Some(j) = (0..n).rev().find(|&k| y[k] > x[k] + tol) else {
            break;
        };
        let Some(k) = (j + 1..n).find(|&k| x[k] > y[k] + tol) else {
            break;
        };
        let (gap_j, gap_k) = (y[j] - x[j], x[k] - y[k]);
        let delta = gap_j.min(gap_k);
        if gap_j <= gap_k {
            y[j] = x[j];
            y[k] += delta;
        } else {
            y[j] -= delta;
            y[k] = x[k];
        }
        steps.push(AROp {
            i: order[j],
            j: order[k],
            eps: delta,
        });
    }
    steps.reverse();
    Ok(steps)
}

/// Replays AR operations on `s`.
pub fn replay(s: &[f64], ops: &[AROp]) -> Result<Vec<f64>> {
    ops.iter().try_fold(s.to_vec(), |acc, op| anti_robin_hood(&acc, *op))
}

/// Capped sequence built from `pi_seq` that majorizes `lam`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma6Cap {
    pub capped: Vec<f64>,
    /// Last full prefix index. `None` when `sum(lam) < pi_seq[0]`, in which
    /// case the whole total sits in slot 0.
    pub t: Option<usize>,
}

/// `[pi_0, ..., pi_t, sum(lam) - sum_{j<=t} pi_j, 0, ..., 0]` for the smallest
/// `t` whose residual lies in `[0, pi_{t+1}]`.
pub fn lemma6_cap(lam: &[f64], pi_seq: &[f64]) -> Result<Lemma6Cap> {
    check_lengths(pi_seq, lam)?;
    check_seq(lam)?;
    check_seq(pi_seq)?;
    let tol = tolerance(lam, pi_seq);
    let descending = |v: &[f64]| v.windows(2).all(|w| w[0] + tol >= w[1]);
    if !descending(lam) || !descending(pi_seq) {
        return Err(Error::Precondition("both sequences must be sorted descending".into()));
    }
    if !weak_majorizes(pi_seq, lam)? {
        return Err(Error::Precondition("`pi_seq` does not weakly majorize `lam`".into()));
    }
    let n = lam.len();
    let total: f64 = lam.iter().sum();
    let mut capped = vec![0.0; n];
    if n == 0 {
        return Ok(Lemma6Cap { capped, t: None });
    }
    if total < pi_seq[0] - tol {
        capped[0] = total;
        return Ok(Lemma6Cap { capped, t: None });
    }
    let mut prefix = 0.0;
    for t in 0..n.saturating_sub(1) {
        prefix += pi_seq[t];
        let residual = total - prefix;
        if residual >= -tol && residual <= pi_seq[t + 1] + tol {
            capped[..=t].copy_from_slice(&pi_seq[..=t]);
            capped[t + 1] = residual.clamp(0.0, pi_seq[t + 1]);
            return Ok(Lemma6Cap { capped, t: Some(t) });
        }
    }
    // n == 1 with total == pi_0
    capped[0] = total;
    Ok(Lemma6Cap { capped, t: None })
}
