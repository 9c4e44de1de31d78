//! Explicit code constructions and the family identifiers used by the CLI.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{CodePair, PowerConstraints};
use crate::error::{Error, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Precondition(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn pair(x1: Vec<f64>, x2: Vec<f64>) -> CodePair {
    CodePair::from_vecs(x1, x2).expect("constructed codewords are valid")
}

/// `x1 = P e_0`, `x2 = P e_K`, both of length `N >= K + 1`.
pub fn th1_code(n: usize, k: usize, p: f64) -> Result<CodePair> {
    positive("P", p)?;
    if k == 0 || n < k + 1 {
        return Err(Error::Precondition(format!(
            "need N >= K + 1 with K >= 1, got N={n}, K={k}"
        )));
    }
    let mut x1 = vec![0.0; n];
    let mut x2 = vec![0.0; n];
    x1[0] = p;
    x2[k] = p;
    Ok(pair(x1, x2))
}

/// The memoryless case of [`th1_code`], optionally with its columns permuted:
/// slot `i` of the result is slot `perm[i]` of the base code.
pub fn cor1_code(n: usize, p: f64, perm: Option<&[usize]>) -> Result<CodePair> {
    if n < 2 {
        return Err(Error::Precondition(format!("need N >= 2, got {n}")));
    }
    let base = th1_code(n, 1, p)?;
    let Some(perm) = perm else {
        return Ok(base);
    };
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&j| j >= n || std::mem::replace(&mut seen[j], true)) {
        return Err(Error::Precondition(format!(
            "{perm:?} is not a permutation of 0..{n}"
        )));
    }
    let pick = |x: &[f64]| perm.iter().map(|&j| x[j]).collect::<Vec<_>>();
    Ok(pair(pick(base.x1().as_slice()), pick(base.x2().as_slice())))
}

/// `([P, 0], [0, x])` with `0 <= x <= P`.
pub fn th2_family(p: f64, x: f64) -> Result<CodePair> {
    positive("P", p)?;
    if !(x.is_finite() && (0.0..=p).contains(&x)) {
        return Err(Error::Precondition(format!("x must lie in [0, {p}], got {x}")));
    }
    Ok(pair(vec![p, 0.0], vec![0.0, x]))
}

/// On/off keying: `([A; N], [0; N])`.
pub fn th3_code(n: usize, a: f64) -> Result<CodePair> {
    positive("A", a)?;
    if n == 0 {
        return Err(Error::Precondition("blocklength must be at least 1".into()));
    }
    Ok(pair(vec![a; n], vec![0.0; n]))
}

/// Peak-and-total construction, cut to `N` slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Th4Code {
    pub code: CodePair,
    /// Set when the second block does not fit in `N` slots.
    pub truncated: bool,
}

/// Blocks of `floor(beta)` entries at `A` followed by `A frac(beta)` (just
/// `beta` entries at `A` when `beta` is an integer); `x1` carries the first
/// block and `x2` the next one.
pub fn th4_code(n: usize, a: f64, beta: f64) -> Result<Th4Code> {
    positive("A", a)?;
    positive("beta", beta)?;
    let whole = beta.floor() as usize;
    let frac = beta - beta.floor();
    if n < whole + 1 {
        return Err(Error::Precondition(format!(
            "need N >= floor(beta) + 1 = {}, got {n}",
            whole + 1
        )));
    }
    let mut block = vec![a; whole];
    if frac > 0.0 {
        block.push(a * frac);
    }
    let len = block.len();
    let mut x1 = vec![0.0; n];
    let mut x2 = vec![0.0; n];
    for (i, v) in block.iter().enumerate() {
        x1[i] = *v;
        if len + i < n {
            x2[len + i] = *v;
        }
    }
    let truncated = n < 2 * len;
    if truncated {
        log::warn!("second block needs {} slots, only {n} available", 2 * len);
    }
    Ok(Th4Code {
        code: pair(x1, x2),
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bench {
    C1,
    C2,
    C3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMode {
    TotalPower,
    PeakPower,
}

/// The three length-4 comparison codes under a total (`P`) or peak (`A`)
/// budget, in the order C1, C2, C3.
pub fn benchmark_codes(mode: BenchMode, value: f64) -> Result<[CodePair; 3]> {
    positive("value", value)?;
    let v = value;
    Ok(match mode {
        BenchMode::TotalPower => {
            let (q, h) = (v / 4.0, v / 2.0);
            [
                pair(vec![q; 4], vec![0.0; 4]),
                pair(vec![h, h, 0.0, 0.0], vec![0.0, 0.0, h, h]),
                pair(vec![v, 0.0, 0.0, 0.0], vec![0.0, 0.0, v, 0.0]),
            ]
        }
        BenchMode::PeakPower => [
            pair(vec![v; 4], vec![0.0; 4]),
            pair(vec![v, v, 0.0, 0.0], vec![0.0, 0.0, v, v]),
            pair(vec![v, v, v, 0.0], vec![0.0, 0.0, 0.0, v]),
        ],
    })
}

/// The two length-2 candidates for the short-block, memory-2 channel:
/// variant 1 is `([P, 0], [0, 0])`, variant 2 is `([P, 0], [0, P])`.
pub fn example6_code(variant: u8, p: f64) -> Result<CodePair> {
    match variant {
        1 => th2_family(p, 0.0),
        2 => th2_family(p, p),
        v => Err(Error::InvalidFamily(format!("example6 variant must be 1 or 2, got {v}"))),
    }
}

/// Named code families addressable from the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum CodeFamily {
    Th1,
    Cor1 { perm: Option<Vec<usize>> },
    Th2 { x: f64 },
    Th3,
    Th4,
    BenchP(Bench),
    BenchA(Bench),
    Example6(u8),
}

/// Inputs a family may need. `k` is the channel memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub n: usize,
    pub k: usize,
    pub total: Option<f64>,
    pub peak: Option<f64>,
}

/// A constructed code together with the budget it is meant to respect.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltCode {
    pub code: CodePair,
    pub constraints: PowerConstraints,
    pub truncated: bool,
}

fn need(v: Option<f64>, what: &str, fam: &CodeFamily) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidFamily(format!("`{fam}` needs {what}")))
}

impl CodeFamily {
    pub fn build(&self, p: &FamilyParams) -> Result<BuiltCode> {
        let total = |code: CodePair, pw: f64| BuiltCode {
            code,
            constraints: PowerConstraints::total_power(pw).expect("positive budget"),
            truncated: false,
        };
        let peak = |code: CodePair, a: f64| BuiltCode {
            code,
            constraints: PowerConstraints::peak_power(a).expect("positive budget"),
            truncated: false,
        };
        Ok(match self {
            CodeFamily::Th1 => {
                let pw = need(p.total, "P", self)?;
                total(th1_code(p.n, p.k, pw)?, pw)
            }
            CodeFamily::Cor1 { perm } => {
                let pw = need(p.total, "P", self)?;
                total(cor1_code(p.n, pw, perm.as_deref())?, pw)
            }
            CodeFamily::Th2 { x } => {
                let pw = need(p.total, "P", self)?;
                total(th2_family(pw, *x)?, pw)
            }
            CodeFamily::Th3 => {
                let a = need(p.peak, "A", self)?;
                peak(th3_code(p.n, a)?, a)
            }
            CodeFamily::Th4 => {
                let a = need(p.peak, "A", self)?;
                let pw = need(p.total, "P", self)?;
                let built = th4_code(p.n, a, pw / a)?;
                BuiltCode {
                    code: built.code,
                    constraints: PowerConstraints::new(Some(pw), Some(a))?,
                    truncated: built.truncated,
                }
            }
            CodeFamily::BenchP(b) => {
                let pw = need(p.total, "P", self)?;
                total(benchmark_codes(BenchMode::TotalPower, pw)?[*b as usize].clone(), pw)
            }
            CodeFamily::BenchA(b) => {
                let a = need(p.peak, "A", self)?;
                peak(benchmark_codes(BenchMode::PeakPower, a)?[*b as usize].clone(), a)
            }
            CodeFamily::Example6(v) => {
                let pw = p.total.unwrap_or(10.0);
                total(example6_code(*v, pw)?, pw)
            }
        })
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bench = |b: &Bench| match b {
            Bench::C1 => "c1",
            Bench::C2 => "c2",
            Bench::C3 => "c3",
        };
        match self {
            CodeFamily::Th1 => write!(f, "th1"),
            CodeFamily::Cor1 { perm: None } => write!(f, "cor1"),
            CodeFamily::Cor1 { perm: Some(p) } => {
                let s: Vec<String> = p.iter().map(|i| i.to_string()).collect();
                write!(f, "cor1:perm={}", s.join(","))
            }
            CodeFamily::Th2 { x } => write!(f, "th2:x={x}"),
            CodeFamily::Th3 => write!(f, "th3"),
            CodeFamily::Th4 => write!(f, "th4"),
            CodeFamily::BenchP(b) => write!(f, "bench-p:{}", bench(b)),
            CodeFamily::BenchA(b) => write!(f, "bench-a:{}", bench(b)),
            CodeFamily::Example6(v) => write!(f, "example6:{v}"),
        }
    }
}

impl FromStr for CodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFamily(format!("unrecognised code family `{s}`"));
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let bench = |a: Option<&str>| match a {
            Some("c1") => Ok(Bench::C1),
            Some("c2") => Ok(Bench::C2),
            Some("c3") => Ok(Bench::C3),
            _ => Err(bad()),
        };
        match (head, arg) {
            ("th1", None) => Ok(CodeFamily::Th1),
            ("th3", None) => Ok(CodeFamily::Th3),
            ("th4", None) => Ok(CodeFamily::Th4),
            ("cor1", None) => Ok(CodeFamily::Cor1 { perm: None }),
            ("cor1", Some(a)) => {
                let list = a.strip_prefix("perm=").ok_or_else(bad)?;
                let perm = list
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CodeFamily::Cor1 { perm: Some(perm) })
            }
            ("th2", Some(a)) => {
                let x = a
                    .strip_prefix("x=")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(bad)?;
                Ok(CodeFamily::Th2 { x })
            }
            ("bench-p", a) => Ok(CodeFamily::BenchP(bench(a)?)),
            ("bench-a", a) => Ok(CodeFamily::BenchA(bench(a)?)),
            ("example6", Some("1")) => Ok(CodeFamily::Example6(1)),
            ("example6", Some("2")) => Ok(CodeFamily::Example6(2)),
            _ => Err(bad()),
        }
    }
}
