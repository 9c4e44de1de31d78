// Exhaustive grid search over a total-power budget, then local refinement.

use poisson_onebit::optimizer::{grid_search, local_refine, SearchSpace};
use poisson_onebit::{exact_error, Channel, PowerConstraints, Result, TruncationSpec};

pub fn run_example() -> Result<f64> {
    let ch = Channel::new(vec![0.6, 0.4], 0.5)?;
    let pc = PowerConstraints::total_power(10.0)?;
    let ts = TruncationSpec::default();
    let space = SearchSpace::new(2, pc, 1.0)?;
    let res = grid_search(&ch, &space, &ts)?;
    println!(
        "{} pairs, best x1={:?} x2={:?} p_err={:.6}",
        res.evaluations,
        res.best.x1().as_slice(),
        res.best.x2().as_slice(),
        res.best_error
    );
    for c in &res.runner_ups {
        println!("  runner-up x1={:?} x2={:?} p_err={:.6}", c.code.x1().as_slice(), c.code.x2().as_slice(), c.p_err);
    }
    let start = poisson_onebit::CodePair::from_vecs(vec![6.0, 3.0], vec![1.0, 0.0])?;
    let refined = local_refine(&start, &ch, &pc, &[1.0, 0.25, 0.05], &ts)?;
    let e = exact_error(&refined, &ch, &ts)?.p_err;
    println!(
        "refined from {:?}/{:?} to {:?}/{:?}, p_err={e:.6}",
        start.x1().as_slice(),
        start.x2().as_slice(),
        refined.x1().as_slice(),
        refined.x2().as_slice()
    );
    Ok(res.best_error)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
