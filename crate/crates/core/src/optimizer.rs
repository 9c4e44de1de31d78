//! Exhaustive grid search over codeword pairs, local refinement, and the
//! first-order necessary conditions for an optimal pair.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{feasible_within, intensities, Channel, CodePair, PowerConstraints};
use crate::engine::{d_vector, exact_error, stationarity_coefficients, TruncationSpec};
use crate::error::{Error, Result};

const RUNNER_UPS: usize = 5;
const DIVIDES_TOL: f64 = 1e-9;

/// Grid of codeword pairs: every slot takes values `0, delta, 2 delta, ...`
/// up to the per-slot cap (the cap itself is always included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub n: usize,
    pub constraints: PowerConstraints,
    pub delta: f64,
    /// Maximum number of pairs to evaluate.
    pub budget: u64,
}

impl SearchSpace {
    pub fn new(n: usize, constraints: PowerConstraints, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("blocklength must be at least 1".into()));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Precondition(format!("grid step must be positive, got {delta}")));
        }
        if let Some(p) = constraints.total() {
            let ratio = p / delta;
            if (ratio - ratio.round()).abs() > DIVIDES_TOL * ratio.max(1.0) {
                return Err(Error::Precondition(format!(
                    "grid step {delta} does not divide P = {p}"
                )));
            }
        }
        Ok(SearchSpace {
            n,
            constraints,
            delta,
            budget: 10_000_000,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn levels(&self) -> Vec<f64> {
        let cap = self.constraints.slot_cap();
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let v = k as f64 * self.delta;
            if v > cap + DIVIDES_TOL * self.delta {
                break;
            }
            out.push(v.min(cap));
            k += 1;
        }
        if out.last().is_some_and(|&v| v < cap) {
            out.push(cap);
        }
        out
    }

    /// Every feasible grid codeword, in lexicographic order.
    pub fn codewords(&self) -> Vec<Vec<f64>> {
        let levels = self.levels();
        let limit = self.constraints.total().map(|p| p + DIVIDES_TOL * self.delta.max(p));
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.n);
        fn rec(
            levels: &[f64],
            n: usize,
            limit: Option<f64>,
            sum: f64,
            cur: &mut Vec<f64>,
            out: &mut Vec<Vec<f64>>,
        ) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for &v in levels {
                if limit.is_some_and(|l| sum + v > l) {
                    break;
                }
                cur.push(v);
                rec(levels, n, limit, sum + v, cur, out);
                cur.pop();
            }
        }
        rec(&levels, self.n, limit, 0.0, &mut cur, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub code: CodePair,
    pub p_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: CodePair,
    pub best_error: f64,
    pub truncation_bound: f64,
    pub evaluations: u64,
    pub runner_ups: Vec<Candidate>,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Orients `(u, v)` so that the flattened pair is lexicographically largest.
fn oriented(u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    if lex_cmp(u, v) == Ordering::Less {
        (v.to_vec(), u.to_vec())
    } else {
        (u.to_vec(), v.to_vec())
    }
}

/// Smaller error first; exact ties go to the lexicographically largest
/// flattened pair.
fn rank(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| lex_cmp(&b.1, &a.1))
}

/// Exact error of every unordered pair of grid codewords; the swapped pair
/// has the same error, so each is evaluated once.
pub fn grid_search(ch: &Channel, space: &SearchSpace, ts: &TruncationSpec) -> Result<SearchResult> {
    let words = space.codewords();
    let m = words.len() as u64;
    let pairs = m * (m + 1) / 2;
    if pairs > space.budget {
        return Err(Error::BudgetExceeded {
            states: pairs as u128,
            budget: space.budget as u128,
        });
    }
    log::info!("grid search over {m} codewords, {pairs} pairs");
    let index: Vec<(usize, usize)> = (0..words.len())
        .flat_map(|i| (i..words.len()).map(move |j| (i, j)))
        .collect();
    let errors: Vec<Result<f64>> = index
        .par_iter()
        .map(|&(i, j)| {
            let cp = CodePair::from_vecs(words[i].clone(), words[j].clone())?;
            Ok(exact_error(&cp, ch, ts)?.p_err)
        })
        .collect();

    let mut ranked: Vec<(f64, Vec<f64>)> = Vec::with_capacity(RUNNER_UPS + 2);
    for (&(i, j), e) in index.iter().zip(errors) {
        let e = e?;
        let (u, v) = oriented(&words[i], &words[j]);
        let flat: Vec<f64> = u.into_iter().chain(v).collect();
        let entry = (e, flat);
        let pos = ranked
            .binary_search_by(|probe| rank(probe, &entry))
            .unwrap_or_else(|p| p);
        if pos <= RUNNER_UPS {
            ranked.insert(pos, entry);
            ranked.truncate(RUNNER_UPS + 1);
        }
    }
    let n = space.n;
    let to_pair = |flat: &[f64]| CodePair::from_vecs(flat[..n].to_vec(), flat[n..].to_vec());
    let (best_error, best_flat) = ranked.first().cloned().expect("grid contains the zero codeword");
    let runner_ups = ranked[1..]
        .iter()
        .map(|(e, f)| Ok(Candidate { code: to_pair(f)?, p_err: *e }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchResult {
        best: to_pair(&best_flat)?,
        best_error,
        truncation_bound: ts.epsilon(),
        evaluations: pairs,
        runner_ups,
    })
}

/// Euclidean projection onto `{0 <= x_i <= cap, sum x <= total}`.
fn project(x: &mut [f64], pc: &PowerConstraints) {
    let cap = pc.peak().unwrap_or(f64::INFINITY);
    let shifted = |tau: f64| x.iter().map(|v| (v - tau).clamp(0.0, cap)).sum::<f64>();
    if pc.total().is_none_or(|p| shifted(0.0) <= p) {
        for v in x.iter_mut() {
            *v = v.clamp(0.0, cap);
        }
        return;
    }
    let p = pc.total().expect("checked above");
    let (mut lo, mut hi) = (0.0, x.iter().copied().fold(0.0, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shifted(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - hi).clamp(0.0, cap);
    }
}

const MAX_PASSES: usize = 50;

/// Projected coordinate descent over all `2N` entries, one pass schedule per
/// step size. A move is kept only if it strictly lowers the exact error.
pub fn local_refine(
    cp: &CodePair,
    ch: &Channel,
    pc: &PowerConstraints,
    steps: &[f64],
    ts: &TruncationSpec,
) -> Result<CodePair> {
    if !feasible_within(cp, pc, 1e-9) {
        return Err(Error::Precondition("starting pair violates the constraints".into()));
    }
    if steps.is_empty() {
        return Ok(cp.clone());
    }
    let n = cp.len();
    let mut flat = cp.flattened();
    let eval = |f: &[f64]| -> Result<f64> {
        let pair = CodePair::from_vecs(f[..n].to_vec(), f[n..].to_vec())?;
        Ok(exact_error(&pair, ch, ts)?.p_err)
    };
    let mut current = eval(&flat)?;
    for &h in steps {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Precondition(format!("step sizes must be positive, got {h}")));
        }
        for _ in 0..MAX_PASSES {
            let mut improved = false;
            for c in 0..2 * n {
                for sign in [1.0, -1.0] {
                    let mut trial = flat.clone();
                    trial[c] += sign * h;
                    let half = if c < n { 0..n } else { n..2 * n };
                    project(&mut trial[half], pc);
                    if trial == flat {
                        continue;
                    }
                    let e = eval(&trial)?;
                    if e < current {
                        log::debug!("step {h}: slot {c} {sign:+} -> {e:.6e}");
                        flat = trial;
                        current = e;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    CodePair::from_vecs(flat[..n].to_vec(), flat[n..].to_vec())
}

/// One failed first-order condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// `sign`, `stationarity`, `slack` or `nu-positive`.
    pub kind: String,
    /// Output slot (`sign`) or input slot (`stationarity`), when applicable.
    pub index: Option<usize>,
    /// Which codeword the condition was derived for (1 or 2).
    pub codeword: u8,
    pub detail: String,
}

/// Conditions for perturbations of one codeword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodewordConditions {
    pub d: Vec<f64>,
    /// `c_j = sum_i D_{j+i} pi_i` for each input slot `j`.
    pub coeffs: Vec<f64>,
    pub nu: Option<f64>,
    pub sign_ok: bool,
    pub stationarity_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessaryReport {
    pub d: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub nu: Option<f64>,
    pub sign_ok: bool,
    pub stationarity_ok: bool,
    /// The two codewords are equal; the conditions hold trivially.
    pub degenerate: bool,
    /// The same conditions for perturbations of `x2`, obtained by swapping
    /// the roles of the codewords.
    pub x2_by_symmetry: CodewordConditions,
    pub violations: Vec<Violation>,
    pub note: String,
}

impl NecessaryReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn conditions_for(
    cp: &CodePair,
    ch: &Channel,
    pc: &PowerConstraints,
    tol: f64,
    ts: &TruncationSpec,
    codeword: u8,
    violations: &mut Vec<Violation>,
) -> Result<CodewordConditions> {
    let d = d_vector(cp, ch, ts)?;
    let ip = intensities(cp, ch);
    let mut push = |kind: &str, index: Option<usize>, detail: String| {
        violations.push(Violation {
            kind: kind.into(),
            index,
            codeword,
            detail,
        })
    };

    let mut sign_ok = true;
    for (i, &di) in d.iter().enumerate() {
        let (l, m) = (ip.lambda[i], ip.mu[i]);
        let ok = match l.total_cmp(&m) {
            Ordering::Greater => di < tol,
            Ordering::Less => di > -tol,
            Ordering::Equal => di.abs() <= tol,
        };
        if !ok {
            sign_ok = false;
            push("sign", Some(i), format!("D={di:.3e} with lambda={l}, mu={m}"));
        }
    }

    let coeffs = stationarity_coefficients(&d, ch)?;
    let x = cp.x1().as_slice();
    let scale = x.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let at_cap = |v: f64| pc.peak().is_some_and(|a| v >= a - 1e-9 * scale);
    let slack = match pc.total() {
        Some(p) => cp.x1().power() < p - tol,
        None => true,
    };
    let free: Vec<f64> = (0..x.len())
        .filter(|&j| x[j] > 0.0 && !at_cap(x[j]))
        .map(|j| coeffs[j])
        .collect();
    let nu = if slack {
        0.0
    } else if !free.is_empty() {
        let lo = free.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = free.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    } else {
        // only capped or zero slots: take the least restrictive multiplier
        let capped = (0..x.len())
            .filter(|&j| x[j] > 0.0)
            .map(|j| coeffs[j])
            .fold(f64::NEG_INFINITY, f64::max);
        if capped.is_finite() {
            capped
        } else {
            (0..x.len())
                .map(|j| coeffs[j])
                .fold(0.0, f64::min)
        }
    };

    let mut stationarity_ok = true;
    if nu > tol {
        stationarity_ok = false;
        push("nu-positive", None, format!("nu={nu:.3e}"));
    }
    for (j, &c) in coeffs.iter().enumerate() {
        let (ok, rel) = if x[j] == 0.0 {
            (c >= nu - tol, ">=")
        } else if at_cap(x[j]) {
            (c <= nu + tol, "<=")
        } else {
            ((c - nu).abs() <= tol, "==")
        };
        if !ok {
            stationarity_ok = false;
            let kind = if slack && x[j] > 0.0 { "slack" } else { "stationarity" };
            push(kind, Some(j), format!("c={c:.3e} should be {rel} nu={nu:.3e}"));
        }
    }
    Ok(CodewordConditions {
        d,
        coeffs,
        nu: Some(nu),
        sign_ok,
        stationarity_ok,
    })
}

/// Checks the first-order conditions an optimal pair must satisfy. Passing
/// does not imply optimality.
pub fn necessary_check(
    cp: &CodePair,
    ch: &Channel,
    pc: &PowerConstraints,
    tol: f64,
    ts: &TruncationSpec,
) -> Result<NecessaryReport> {
    if !feasible_within(cp, pc, 1e-9) {
        return Err(Error::Precondition("pair violates the constraints".into()));
    }
    let degenerate = cp.x1() == cp.x2();
    let mut violations = Vec::new();
    let first = conditions_for(cp, ch, pc, tol, ts, 1, &mut violations)?;
    let second = conditions_for(&cp.swapped(), ch, pc, tol, ts, 2, &mut violations)?;
    Ok(NecessaryReport {
        d: first.d,
        coeffs: first.coeffs,
        nu: first.nu,
        sign_ok: first.sign_ok,
        stationarity_ok: first.stationarity_ok,
        degenerate,
        x2_by_symmetry: second,
        violations,
        note: if degenerate {
            "necessary, not sufficient; the codewords are equal so the conditions are vacuous".into()
        } else {
            "necessary, not sufficient; x2 conditions follow by symmetry".into()
        },
    })
}
