//! Acceptance suite. One PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use poisson_onebit::bounds::lemma8_bounds;
use poisson_onebit::constructions::{benchmark_codes, example6_code, th1_code, th3_code, BenchMode};
use poisson_onebit::majorization::{anti_robin_hood, AROp};
use poisson_onebit::optimizer::{grid_search, necessary_check, SearchSpace};
use poisson_onebit::{
    d_vector_intensities, decision_rule, error_with_fixed_rule, exact_error, exact_error_intensities,
    mc_error, Channel, CodePair, IntensityPair, PowerConstraints, TruncationSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Published values are rounded to four decimals.
const PUBLISHED_TOL: f64 = 5e-5;
const EPSILON: f64 = 1e-10;
/// Two truncated evaluations can each be off by `EPSILON`.
const PAIR_TOL: f64 = 2.0 * EPSILON;
const EX6_MAX_TIME: Duration = Duration::from_secs(1);
const GRID_MAX_TIME: Duration = Duration::from_secs(300);
const FD_STEP: f64 = 1e-4;
const FD_EPSILON: f64 = 1e-13;
const FD_REL_TOL: f64 = 1e-3;
/// Gradient entries below this are dominated by finite-difference noise.
const FD_MIN_MAGNITUDE: f64 = 1e-6;
/// Memory-3 two-pulse codes at high power enumerate a few hundred million
/// states, beyond the default budget.
const SATURATION_BUDGET: u128 = 1_000_000_000;
const SIGN_TOL: f64 = 1e-8;
const NECESSARY_TOL: f64 = 1e-4;
const MC_SAMPLES: u64 = 100_000;
const MC_SE_MULTIPLE: f64 = 4.0;

type Outcome = Result<String, String>;

fn ts() -> TruncationSpec {
    TruncationSpec::new(EPSILON).unwrap()
}

fn err_of(cp: &CodePair, ch: &Channel) -> f64 {
    exact_error(cp, ch, &ts()).unwrap().p_err
}

fn err_ip(l: &[f64], m: &[f64], d: f64) -> f64 {
    let ip = IntensityPair::new(l.to_vec(), m.to_vec()).unwrap();
    exact_error_intensities(&ip, d, &ts()).unwrap().p_err
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_channel(rng: &mut ChaCha8Rng, k: usize, d: f64) -> Channel {
    let w: Vec<f64> = (0..=k).map(|_| rng.random_range(0.05..1.0)).collect();
    let scale = rng.random_range(0.5..1.0) / w.iter().sum::<f64>();
    Channel::new(w.iter().map(|x| x * scale).collect(), d).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn cli(args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = poisson_onebit::cli::run(
        std::iter::once("poisson-onebit").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code == 0 {
        Ok(String::from_utf8(out).unwrap())
    } else {
        Err(format!("exit {code}: {}", String::from_utf8_lossy(&err)))
    }
}

fn c1_short_block() -> Outcome {
    let ch = Channel::new(vec![0.6, 0.4], 0.5).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for (variant, want) in [(1, 0.0092), (2, 0.0095)] {
        let cp = example6_code(variant, 10.0).unwrap();
        let t = Instant::now();
        let e = err_of(&cp, &ch);
        let dt = t.elapsed();
        ok &= (e - want).abs() <= PUBLISHED_TOL && dt < EX6_MAX_TIME;
        parts.push(format!("{e:.6} vs {want} in {dt:.2?}"));
    }
    check(ok, parts.join(", "))
}

fn c2_peak_power() -> Outcome {
    let ch = Channel::memoryless(0.25).unwrap();
    let codes = benchmark_codes(BenchMode::PeakPower, 1.5).unwrap();
    let c1 = err_of(&codes[0], &ch);
    let c3 = err_of(&codes[2], &ch);
    check(
        (c1 - 0.0504).abs() <= PUBLISHED_TOL && (c3 - 0.0485).abs() <= PUBLISHED_TOL && c3 < c1,
        format!("C1 {c1:.6} vs 0.0504, C3 {c3:.6} vs 0.0485"),
    )
}

fn c3_grid_optimality() -> Outcome {
    let ch = Channel::new(vec![0.5, 0.5], 0.5).unwrap();
    let pc = PowerConstraints::total_power(8.0).unwrap();
    let t = Instant::now();
    let res = grid_search(&ch, &SearchSpace::new(3, pc, 1.0).unwrap(), &ts()).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    let th1 = err_of(&th1_code(3, 2, 8.0).unwrap(), &ch);
    check(
        res.best_error >= th1 - PAIR_TOL && dt < GRID_MAX_TIME,
        format!(
            "grid best {:.12} over {} pairs, th1 {th1:.12}, {dt:.1?}",
            res.best_error, res.evaluations
        ),
    )
}

fn c4_saturation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let k = rng.random_range(1..=3);
        let d = rng.random_range(0.05..=2.0);
        let ch = random_channel(&mut rng, k, d);
        let p = rng.random_range(0.5..=20.0);
        let big = ts().with_budget(SATURATION_BUDGET);
        let eval = |n: usize| exact_error(&th1_code(n, k, p).unwrap(), &ch, &big).map(|e| e.p_err);
        let short = eval(k + 1).map_err(|e| e.to_string())?;
        let long = eval(k + 2).map_err(|e| e.to_string())?;
        worst = worst.max((short - long).abs());
    }
    check(worst <= PAIR_TOL, format!("max |difference| {worst:.2e} over 5 instances"))
}

fn c5_sandwich() -> Outcome {
    let d = 0.25;
    let ch = Channel::memoryless(d).unwrap();
    let mut failures = Vec::new();
    let mut count = 0;
    for n in [1, 2, 4] {
        for a in [1.0, 2.0, 4.0] {
            let b = lemma8_bounds(n, a, d).unwrap();
            let e = err_of(&th3_code(n, a).unwrap(), &ch);
            let upper = b.upper.ok_or(format!("no upper bound at N={n} A={a}"))?;
            count += 1;
            if !(b.lower <= e + EPSILON && e - EPSILON <= upper) {
                failures.push(format!("N={n} A={a}: {} / {e} / {upper}", b.lower));
            }
        }
    }
    check(failures.is_empty(), format!("{count} cases, {} outside {}", failures.len(), failures.join("; ")))
}

fn c6_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fine = TruncationSpec::new(FD_EPSILON).unwrap();
    let (mut checked, mut worst) = (0, 0.0f64);
    for _ in 0..10 {
        let n = rng.random_range(1..=3);
        let l = random_vec(&mut rng, n, 0.5, 5.0);
        let m = random_vec(&mut rng, n, 0.0, 5.0);
        let d = rng.random_range(0.2..1.5);
        let ip = IntensityPair::new(l.clone(), m.clone()).unwrap();
        let rule = decision_rule(&ip, d).unwrap();
        let dv = d_vector_intensities(&ip, d, &fine).unwrap();
        for i in 0..n {
            if dv[i].abs() < FD_MIN_MAGNITUDE {
                continue;
            }
            let at = |delta: f64| {
                let mut l2 = l.clone();
                l2[i] += delta;
                let shifted = IntensityPair::new(l2, m.clone()).unwrap();
                error_with_fixed_rule(&shifted, &rule, d, &fine).unwrap().0
            };
            let fd = (at(FD_STEP) - at(-FD_STEP)) / (2.0 * FD_STEP);
            worst = worst.max((dv[i] - fd).abs() / dv[i].abs());
            checked += 1;
        }
    }
    check(
        worst <= FD_REL_TOL && checked > 0,
        format!("{checked} coordinates, worst relative error {worst:.2e}"),
    )
}

fn c7_signs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for _ in 0..20 {
        let n = rng.random_range(1..=4);
        let l = random_vec(&mut rng, n, 0.0, 6.0);
        let mut m = random_vec(&mut rng, n, 0.0, 6.0);
        if n > 1 {
            m[0] = l[0];
        }
        let d = rng.random_range(0.1..1.5);
        let dv = d_vector_intensities(&IntensityPair::new(l.clone(), m.clone()).unwrap(), d, &ts()).unwrap();
        for i in 0..n {
            let ok = match l[i].partial_cmp(&m[i]).unwrap() {
                std::cmp::Ordering::Greater => dv[i] < SIGN_TOL,
                std::cmp::Ordering::Less => dv[i] > -SIGN_TOL,
                std::cmp::Ordering::Equal => dv[i].abs() <= SIGN_TOL,
            };
            bad += usize::from(!ok);
        }
    }
    let ch = Channel::new(vec![0.6, 0.4], 0.5).unwrap();
    let pc = PowerConstraints::total_power(10.0).unwrap();
    let cp = example6_code(1, 10.0).unwrap();
    let report = necessary_check(&cp, &ch, &pc, NECESSARY_TOL, &ts()).unwrap();
    check(
        bad == 0 && report.passed(),
        format!("{bad} sign violations; conditions at the short-block optimum pass: {}", report.passed()),
    )
}

fn c8_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut l1_bad, mut l3_bad, mut ar_bad) = (0, 0, 0);
    for _ in 0..50 {
        let n = rng.random_range(1..=3);
        let l = random_vec(&mut rng, n, 0.0, 6.0);
        let m = random_vec(&mut rng, n, 0.0, 6.0);
        let d = rng.random_range(0.1..1.5);
        let i = rng.random_range(0..n);
        let bump = rng.random_range(0.0..3.0);
        let (mut l2, mut m2) = (l.clone(), m.clone());
        if l[i] >= m[i] {
            l2[i] += bump;
            m2[i] = (m[i] - bump).max(0.0);
        } else {
            m2[i] += bump;
            l2[i] = (l[i] - bump).max(0.0);
        }
        l1_bad += usize::from(err_ip(&l2, &m2, d) > err_ip(&l, &m, d) + PAIR_TOL);
    }
    for _ in 0..50 {
        let n = rng.random_range(2..=3);
        let l = random_vec(&mut rng, n, 0.0, 6.0);
        let m = random_vec(&mut rng, n, 0.0, 6.0);
        let d = rng.random_range(0.1..1.5);
        let j = rng.random_range(0..n);
        let k = (j + rng.random_range(1..n)) % n;
        let rule = decision_rule(&IntensityPair::new(l.clone(), m.clone()).unwrap(), d).unwrap();
        let (j, k) = if rule.weights()[j] >= rule.weights()[k] { (j, k) } else { (k, j) };
        let eps = rng.random_range(0.0..=1.0) * l[k];
        let mut l2 = l.clone();
        l2[k] -= eps;
        l2[j] += eps;
        l3_bad += usize::from(err_ip(&l2, &m, d) > err_ip(&l, &m, d) + PAIR_TOL);
    }
    for _ in 0..50 {
        let l = random_vec(&mut rng, 3, 0.0, 5.0);
        let mut m = random_vec(&mut rng, 3, 0.0, 5.0);
        m[1] = m[0];
        let d = rng.random_range(0.1..1.5);
        let (i, j) = if l[0] >= l[1] { (0, 1) } else { (1, 0) };
        let eps = rng.random_range(0.05..=1.0) * l[j];
        let l2 = anti_robin_hood(&l, AROp::new(i, j, eps).unwrap()).unwrap();
        ar_bad += usize::from(err_ip(&l2, &m, d) > err_ip(&l, &m, d) + PAIR_TOL);
    }
    check(
        l1_bad + l3_bad + ar_bad == 0,
        format!("increases: {l1_bad}/50 widening, {l3_bad}/50 weight shift, {ar_bad}/50 AR"),
    )
}

fn c9_monte_carlo() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let k = rng.random_range(0..=2);
        let d = rng.random_range(0.1..1.5);
        let ch = random_channel(&mut rng, k, d);
        let n = rng.random_range(1..=3);
        let x1 = random_vec(&mut rng, n, 0.0, 4.0);
        let x2 = random_vec(&mut rng, n, 0.0, 4.0);
        let cp = CodePair::from_vecs(x1, x2).unwrap();
        let exact = err_of(&cp, &ch);
        let mc = mc_error(&cp, &ch, MC_SAMPLES, seed).unwrap();
        let se = mc.std_error.unwrap();
        let gap = (mc.p_err - exact).abs();
        let z = match se > 0.0 {
            true => gap / se,
            false if gap <= EPSILON => 0.0,
            false => f64::INFINITY,
        };
        worst = worst.max(z);
    }
    check(worst <= MC_SE_MULTIPLE, format!("largest deviation {worst:.2} SE over 20 instances"))
}

fn c10_non_convex() -> Outcome {
    let csv = cli(&[
        "sweep", "--channel", r#"{"pi":[0.5,0.5],"d":0.1}"#, "--P", "20", "--code", "th2:x=0",
        "--var", "x", "--from", "0", "--to", "20", "--steps", "41",
    ])?;
    let pts: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            for c in b + 1..pts.len() {
                let (x1, f1) = pts[a];
                let (x2, f2) = pts[b];
                let (x3, f3) = pts[c];
                let chord = f1 + (f3 - f1) * (x2 - x1) / (x3 - x1);
                if f2 > chord + PAIR_TOL {
                    return Ok(format!("f({x2}) = {f2:.4e} above chord {chord:.4e} of x = {x1}, {x3}"));
                }
            }
        }
    }
    Err(format!("no chord violation among {} points", pts.len()))
}

fn c11_region_symmetry() -> Outcome {
    let csv = cli(&["region", "--P", "10", "--d", "0.5", "--grid", "21"])?;
    let mut map = std::collections::HashMap::new();
    for l in csv.lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        let key = |s: &str| (s.parse::<f64>().unwrap() * 20.0).round() as i64;
        map.insert((key(f[0]), key(f[1])), f[2].to_string());
    }
    let asym = map.iter().filter(|((a, b), w)| map.get(&(*b, *a)) != Some(w)).count();
    check(
        asym == 0 && map.len() == 231,
        format!("{} grid points, {asym} asymmetric", map.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("short-block reproduction", c1_short_block),
        ("peak-power comparison", c2_peak_power),
        ("grid optimality of the two-pulse code", c3_grid_optimality),
        ("blocklength saturation", c4_saturation),
        ("on/off bound sandwich", c5_sandwich),
        ("gradient vs finite differences", c6_gradient),
        ("gradient signs and first-order conditions", c7_signs),
        ("monotonicity suites", c8_monotonicity),
        ("Monte Carlo consistency", c9_monte_carlo),
        ("non-convex power split", c10_non_convex),
        ("region map symmetry", c11_region_symmetry),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
