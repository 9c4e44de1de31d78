//! Closed-form error bounds for on/off signalling and the high-power
//! optimality conditions built from them. Everything is evaluated in log
//! space and compared there.
//!
//! The Chernoff upper bound on the error of `n` slots at per-slot intensity `a`
//! is `exp(-n(a+d)) * (e (a+d) L / a)^E` with `L = ln((a+d)/d)`. The bound that
//! follows from optimising the Chernoff parameter has `E = n a / L`
//! ([`ExponentForm::Chernoff`]). The optimality conditions are also offered
//! with `E = n / L` ([`ExponentForm::Printed`]), which is the form the
//! published closed-form conditions use.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};

/// Exponent convention for the Chernoff-type upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentForm {
    /// `E = n / L`.
    #[default]
    Printed,
    /// `E = n a / L`, a valid upper bound whenever `a >= 2d`.
    Chernoff,
}

impl std::str::FromStr for ExponentForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(ExponentForm::Printed),
            "chernoff" => Ok(ExponentForm::Chernoff),
            other => Err(Error::Precondition(format!(
                "unknown exponent form `{other}` (expected printed or chernoff)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: f64,
    pub ln_lower: f64,
    /// Raw upper bound; `None` outside the regime where it holds.
    pub upper: Option<f64>,
    pub ln_upper: Option<f64>,
    /// `min(upper, 1)`.
    pub upper_clamped: Option<f64>,
    /// Whether the per-slot intensity is at least twice the dark noise.
    pub regime_ok: bool,
}

impl BoundPair {
    fn new(ln_lower: f64, ln_upper: f64, regime_ok: bool) -> Self {
        let upper = regime_ok.then(|| ln_upper.exp());
        BoundPair {
            lower: ln_lower.exp(),
            ln_lower,
            upper,
            ln_upper: regime_ok.then_some(ln_upper),
            upper_clamped: upper.map(|u| u.min(1.0)),
            regime_ok,
        }
    }
}

/// `ln` of the Chernoff-type upper bound for `n` slots at intensity `a`.
pub fn ln_chernoff_upper(n: f64, a: f64, d: f64, form: ExponentForm) -> f64 {
    let l = ((a + d) / d).ln();
    let exponent = match form {
        ExponentForm::Printed => n / l,
        ExponentForm::Chernoff => n * a / l,
    };
    // ln(e (a+d) L / a) = 1 + ln(a+d) + ln L - ln a
    -n * (a + d) + exponent * (1.0 + (a + d).ln() + l.ln() - a.ln())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Precondition(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Bounds on the error of the on/off code `([A; N], [0; N])` over a
/// memoryless channel with unit gain.
pub fn lemma8_bounds(n: usize, a: f64, d: f64) -> Result<BoundPair> {
    if n == 0 {
        return Err(Error::Precondition("blocklength must be at least 1".into()));
    }
    check_positive("A", a)?;
    check_positive("d", d)?;
    let nf = n as f64;
    Ok(BoundPair::new(
        -nf * (a + d) - LN_2,
        ln_chernoff_upper(nf, a, d, ExponentForm::Chernoff),
        a >= 2.0 * d,
    ))
}

/// Bounds in terms of the total intensity `P` of the louder hypothesis spread
/// over `n` of the `big_n` output slots.
pub fn lemma9_bounds(p: f64, n: usize, big_n: usize, d: f64, form: ExponentForm) -> Result<BoundPair> {
    check_positive("P", p)?;
    check_positive("d", d)?;
    if n == 0 || n > big_n {
        return Err(Error::Precondition(format!(
            "need 1 <= n <= N, got n={n}, N={big_n}"
        )));
    }
    let nf = n as f64;
    let a = p / nf;
    Ok(BoundPair::new(
        -(p + big_n as f64 * d) - LN_2,
        ln_chernoff_upper(nf, a, d, form),
        a >= 2.0 * d,
    ))
}

/// Both sides of a condition in log space; the condition holds when
/// `ln_bound <= ln_target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionSides {
    pub ln_bound: f64,
    pub ln_target: f64,
}

impl ConditionSides {
    pub fn holds(&self) -> bool {
        self.ln_bound <= self.ln_target
    }
}

/// Sides of the on/off optimality condition over a channel with memory:
/// the upper bound of on/off against the lower bound of the best competitor.
pub fn th3_sides(a: f64, n: usize, ch: &Channel, form: ExponentForm) -> Result<ConditionSides> {
    check_positive("A", a)?;
    if n == 0 {
        return Err(Error::Precondition("blocklength must be at least 1".into()));
    }
    if ch.pi().iter().any(|p| *p <= 0.0) {
        return Err(Error::Precondition(
            "the condition requires every channel coefficient to be positive".into(),
        ));
    }
    let slots = (n + ch.memory() - 1) as f64;
    let total = n as f64 * a * ch.pi_sum();
    let d = ch.d();
    let pi_min = ch.pi().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConditionSides {
        ln_bound: ln_chernoff_upper(slots, total / slots, d, form),
        ln_target: -LN_2 - (total - a * pi_min + slots * d),
    })
}

pub fn th3_condition(a: f64, n: usize, ch: &Channel, form: ExponentForm) -> Result<bool> {
    Ok(th3_sides(a, n, ch, form)?.holds())
}

/// `(Gamma, n)`: fractional part of `beta` (1 when integer) and the number of
/// occupied slots of the louder codeword.
pub fn gamma_n(beta: f64) -> Result<(f64, usize)> {
    check_positive("beta", beta)?;
    let frac = beta.fract();
    if frac > 0.0 {
        Ok((frac, beta.floor() as usize + 1))
    } else {
        Ok((1.0, beta as usize))
    }
}

/// Sides of the peak-and-total optimality condition on the memoryless
/// channel: the upper bound over `n` slots against the competitor lower bound
/// `exp(-(A(beta - Gamma) + N d)) / 2`.
pub fn th4_sides(a: f64, beta: f64, d: f64, big_n: usize, form: ExponentForm) -> Result<ConditionSides> {
    check_positive("A", a)?;
    check_positive("d", d)?;
    let (gamma, n) = gamma_n(beta)?;
    if big_n == 0 {
        return Err(Error::Precondition("blocklength must be at least 1".into()));
    }
    let nf = n as f64;
    Ok(ConditionSides {
        ln_bound: ln_chernoff_upper(nf, a * beta / nf, d, form),
        ln_target: -LN_2 - (a * (beta - gamma) + big_n as f64 * d),
    })
}

pub fn th4_condition(a: f64, beta: f64, d: f64, big_n: usize, form: ExponentForm) -> Result<bool> {
    Ok(th4_sides(a, beta, d, big_n, form)?.holds())
}

/// Numerical threshold: the smallest `A >= a_lo` (to within `tol`) at which
/// `cond` holds at `A`, `2A` and `4A`.
///
/// The bracket is found by doubling from `a_lo` up to `a_hi_cap`, then refined
/// by bisection. `cond` need not be monotone, so the answer is heuristic.
pub fn a_star<F: Fn(f64) -> bool>(cond: F, a_lo: f64, a_hi_cap: f64, tol: f64) -> Result<f64> {
    check_positive("a_lo", a_lo)?;
    check_positive("tol", tol)?;
    if !(a_hi_cap >= a_lo) {
        return Err(Error::Precondition("cap must be at least a_lo".into()));
    }
    let guard = |a: f64| cond(a) && cond(2.0 * a) && cond(4.0 * a);
    if guard(a_lo) {
        return Ok(a_lo);
    }
    let mut lo = a_lo;
    let mut hi = a_lo;
    loop {
        if hi > a_hi_cap {
            return Err(Error::NotFound { cap: a_hi_cap });
        }
        if guard(hi) {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if guard(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{exact_error, TruncationSpec, DEFAULT_EPSILON};
    use crate::{CodePair, IntensityPair};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn lemma8_examples() {
        let b = lemma8_bounds(2, 1.0, 0.25).unwrap();
        assert!(rel(b.lower, 0.5 * (-2.5f64).exp()) < 1e-14);
        assert!((b.lower - 0.04104).abs() < 1e-5);
        assert!(b.regime_ok);
        let b = lemma8_bounds(1, 0.5, 0.25).unwrap();
        assert!(b.regime_ok);
        assert!(b.lower <= b.upper.unwrap());
        let b = lemma8_bounds(1, 0.3, 0.25).unwrap();
        assert!(!b.regime_ok && b.upper.is_none());
        assert!(lemma8_bounds(0, 1.0, 0.25).is_err());
        // direct evaluation of the closed form
        let (n, a, d) = (3.0f64, 2.0f64, 0.25f64);
        let l = ((a + d) / d).ln();
        let direct = (-n * (a + d)).exp() * (std::f64::consts::E * (a + d) * l / a).powf(n * a / l);
        assert!(rel(lemma8_bounds(3, a, d).unwrap().upper.unwrap(), direct) < 1e-12);
    }

    #[test]
    fn lemma8_sandwich_on_off() {
        let ch = Channel::new(vec![1.0], 0.25).unwrap();
        let ts = TruncationSpec::default();
        for n in [1usize, 2, 4] {
            for a in [1.0, 2.0, 4.0] {
                let cp = CodePair::from_vecs(vec![a; n], vec![0.0; n]).unwrap();
                let e = exact_error(&cp, &ch, &ts).unwrap().p_err;
                let b = lemma8_bounds(n, a, 0.25).unwrap();
                assert!(b.lower <= e + 2.0 * DEFAULT_EPSILON, "N={n} A={a}");
                assert!(e <= b.upper.unwrap() + 2.0 * DEFAULT_EPSILON, "N={n} A={a}");
            }
        }
    }

    #[test]
    fn lemma9_examples() {
        let b = lemma9_bounds(10.0, 1, 2, 0.5, ExponentForm::Chernoff).unwrap();
        assert!(rel(b.lower, 0.5 * (-11f64).exp()) < 1e-14);
        for (n, a) in [(1usize, 1.0), (2, 3.0), (4, 0.7)] {
            let l8 = lemma8_bounds(n, a, 0.25).unwrap();
            let l9 = lemma9_bounds(n as f64 * a, n, n, 0.25, ExponentForm::Chernoff).unwrap();
            assert!(rel(l8.lower, l9.lower) < 1e-14);
            assert!(rel(l8.upper.unwrap(), l9.upper.unwrap()) < 1e-12);
        }
        assert!(lemma9_bounds(10.0, 3, 2, 0.5, ExponentForm::Printed).is_err());
        assert!(!lemma9_bounds(0.5, 2, 2, 0.5, ExponentForm::Printed).unwrap().regime_ok);
    }

    #[test]
    fn lemma9_sandwich_disjoint_support() {
        // louder codeword on n slots, the other on the rest
        let ch = Channel::new(vec![1.0], 0.3).unwrap();
        let ts = TruncationSpec::default();
        for (x1, x2) in [
            (vec![3.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]),
            (vec![4.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]),
            (vec![2.0, 2.0, 0.0, 0.0], vec![0.0, 0.0, 1.5, 0.5]),
        ] {
            let p: f64 = x1.iter().sum();
            let n = x1.iter().filter(|v| **v > 0.0).count();
            let cp = CodePair::from_vecs(x1.clone(), x2).unwrap();
            let e = exact_error(&cp, &ch, &ts).unwrap().p_err;
            let b = lemma9_bounds(p, n, x1.len(), 0.3, ExponentForm::Chernoff).unwrap();
            assert!(b.lower <= e && e <= b.upper.unwrap(), "{x1:?}: {e} {b:?}");
        }
    }

    #[test]
    fn finite_at_large_intensity() {
        let b = lemma8_bounds(4, 1e6, 0.25).unwrap();
        assert!(b.ln_lower.is_finite() && b.ln_upper.unwrap().is_finite());
        let ch = Channel::new(vec![0.5, 0.5], 0.25).unwrap();
        let s = th3_sides(1e6, 2, &ch, ExponentForm::Chernoff).unwrap();
        assert!(s.ln_bound.is_finite() && s.ln_target.is_finite());
    }

    #[test]
    fn gamma_n_examples() {
        assert_eq!(gamma_n(2.5).unwrap(), (0.5, 3));
        assert_eq!(gamma_n(3.0).unwrap(), (1.0, 3));
        assert_eq!(gamma_n(0.5).unwrap(), (0.5, 1));
        let (g, n) = gamma_n(3.0 + 1e-9).unwrap();
        assert!(g < 1e-8 && n == 4);
        assert!(gamma_n(0.0).is_err());
    }

    #[test]
    fn th3_examples() {
        let ch = Channel::new(vec![0.5, 0.5], 0.25).unwrap();
        for form in [ExponentForm::Printed, ExponentForm::Chernoff] {
            assert!(!th3_condition(1e-3, 2, &ch, form).unwrap());
            assert!(th3_condition(1e7, 2, &ch, form).unwrap());
            // once true on the doubling grid, stays true
            let grid: Vec<bool> = (-10..24)
                .map(|k| th3_condition(2f64.powi(k), 2, &ch, form).unwrap())
                .collect();
            let first = grid.iter().position(|b| *b).unwrap();
            assert!(grid[first..].iter().all(|b| *b));
        }
        let zero = Channel::new(vec![1.0, 0.0], 0.25).unwrap();
        assert!(th3_condition(10.0, 2, &zero, ExponentForm::Printed).is_err());
    }

    #[test]
    fn th4_examples() {
        let form = ExponentForm::Printed;
        assert!(th4_condition(100.0, 2.5, 0.25, 3, form).unwrap());
        assert!(!th4_condition(0.01, 2.5, 0.25, 3, form).unwrap());
        let s = th4_sides(7.0, 2.5, 0.25, 5, form).unwrap();
        assert!(rel(s.ln_target, -LN_2 - (7.0 * 2.0 + 5.0 * 0.25)) < 1e-14);
        // an integer beta uses n = beta slots, a tiny fractional part one more
        let at_int = th4_sides(50.0, 3.0, 0.25, 5, form).unwrap();
        let above = th4_sides(50.0, 3.0 + 1e-9, 0.25, 5, form).unwrap();
        assert!(rel(at_int.ln_bound, ln_chernoff_upper(3.0, 50.0, 0.25, form)) < 1e-14);
        assert!(rel(above.ln_bound, ln_chernoff_upper(4.0, 150.0 / 4.0, 0.25, form)) < 1e-6);
        assert!((at_int.ln_target - above.ln_target - 50.0).abs() < 1e-5);
        assert!(th4_condition(1e10, 2.5, 0.25, 3, ExponentForm::Chernoff).unwrap());
    }

    // Extended-precision evaluation of both sides (50 significant digits),
    // frozen here: (A, N, pi, d, form, ln_bound, ln_target).
    #[allow(clippy::type_complexity)]
    const TH3_ORACLE: &[(f64, usize, &[f64], f64, ExponentForm, f64, f64)] = &[
        (0.7, 2, &[0.5, 0.5], 0.25, ExponentForm::Printed, 2.0681493167871271, -2.4931471805599452),
        (13.0, 3, &[0.6, 0.3, 0.1], 0.5, ExponentForm::Printed, -37.771264918005143, -40.893147180559944),
        (250.0, 1, &[0.9, 0.2], 1.5, ExponentForm::Printed, -276.88657619069999, -228.69314718055995),
        (4.2, 5, &[1.0], 0.1, ExponentForm::Chernoff, -8.3888549562559379, -17.993147180559946),
        (1.0e5, 2, &[0.5, 0.5], 0.25, ExponentForm::Chernoff, -143568.84512409937, -150001.44314718056),
    ];
    const TH4_ORACLE: &[(f64, f64, f64, usize, ExponentForm, f64, f64)] = &[
        (100.0, 2.5, 0.25, 3, ExponentForm::Printed, -249.32387564768545, -201.44314718055995),
        (0.01, 2.5, 0.25, 3, ExponentForm::Printed, 92.212704000055298, -1.4631471805599453),
        (37.5, 3.0, 0.8, 4, ExponentForm::Printed, -113.05902085384805, -78.893147180559945),
        (2.0e4, 1.25, 0.05, 2, ExponentForm::Chernoff, -17919.900855909028, -20000.79314718056),
        (9.0, 0.4, 2.0, 1, ExponentForm::Chernoff, -0.45666347223362188, -2.6931471805599453),
    ];

    #[test]
    fn conditions_match_extended_precision() {
        for &(a, n, pi, d, form, lb, lt) in TH3_ORACLE {
            let ch = Channel::new(pi.to_vec(), d).unwrap();
            let s = th3_sides(a, n, &ch, form).unwrap();
            assert!(rel(s.ln_bound, lb) < 1e-9, "A={a}: {} vs {lb}", s.ln_bound);
            assert!(rel(s.ln_target, lt) < 1e-9, "A={a}: {} vs {lt}", s.ln_target);
            assert_eq!(s.holds(), lb <= lt);
        }
        for &(a, beta, d, n, form, lb, lt) in TH4_ORACLE {
            let s = th4_sides(a, beta, d, n, form).unwrap();
            assert!(rel(s.ln_bound, lb) < 1e-9, "A={a}: {} vs {lb}", s.ln_bound);
            assert!(rel(s.ln_target, lt) < 1e-9, "A={a}: {} vs {lt}", s.ln_target);
            assert_eq!(s.holds(), lb <= lt);
        }
    }

    #[test]
    fn a_star_examples() {
        assert_eq!(a_star(|_| true, 1.0, 1e6, 1e-6).unwrap(), 1.0);
        let a = a_star(|a| a >= 7.0, 1.0, 1e6, 1e-6).unwrap();
        assert!((a - 7.0).abs() <= 1e-6);
        assert!(matches!(
            a_star(|_| false, 1.0, 100.0, 1e-3),
            Err(Error::NotFound { .. })
        ));
        let ch = Channel::new(vec![0.5, 0.5], 0.25).unwrap();
        let a = a_star(
            |a| th3_condition(a, 2, &ch, ExponentForm::Printed).unwrap(),
            1e-3,
            1e9,
            1e-6,
        )
        .unwrap();
        assert!(a.is_finite() && a > 1e-3);
        assert!(th3_condition(a, 2, &ch, ExponentForm::Printed).unwrap());
    }

    proptest! {
        #[test]
        fn lemma8_lower_below_upper(n in 1usize..20, a in 0.01..1e4f64, d in 0.01..10.0f64) {
            let b = lemma8_bounds(n, a, d).unwrap();
            prop_assert!(b.ln_lower.is_finite());
            if let Some(u) = b.ln_upper {
                prop_assert!(b.ln_lower <= u);
            }
        }

        #[test]
        fn lemma9_sandwich_random(x in prop::collection::vec(0.5..6.0f64, 1..4), d in 0.05..0.4f64) {
            // louder codeword on the first n slots, silent elsewhere
            let n = x.len();
            let p: f64 = x.iter().sum();
            let mut l = x.clone();
            l.push(0.0);
            let m = vec![0.0; n + 1];
            let ip = IntensityPair::new(l, m).unwrap();
            let e = crate::engine::exact_error_intensities(&ip, d, &TruncationSpec::default()).unwrap().p_err;
            let b = lemma9_bounds(p, n, n + 1, d, ExponentForm::Chernoff).unwrap();
            prop_assert!(b.lower <= e + 2.0 * DEFAULT_EPSILON);
            if let Some(u) = b.upper {
                prop_assert!(e <= u + 2.0 * DEFAULT_EPSILON);
            }
        }
    }
}
