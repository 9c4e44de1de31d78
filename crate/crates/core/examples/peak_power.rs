// Length-4 comparison codes on a memoryless channel under a peak budget.

use poisson_onebit::constructions::{benchmark_codes, BenchMode};
use poisson_onebit::{exact_error, Channel, Result, TruncationSpec};

pub fn run_example() -> Result<Vec<(f64, [f64; 3])>> {
    let ch = Channel::memoryless(0.25)?;
    let ts = TruncationSpec::default();
    let mut rows = Vec::new();
    println!("{:>6} {:>10} {:>10} {:>10}", "A", "C1", "C2", "C3");
    for a in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let codes = benchmark_codes(BenchMode::PeakPower, a)?;
        let mut e = [0.0; 3];
        for (slot, cp) in e.iter_mut().zip(&codes) {
            *slot = exact_error(cp, &ch, &ts)?.p_err;
        }
        println!("{a:>6} {:>10.6} {:>10.6} {:>10.6}", e[0], e[1], e[2]);
        rows.push((a, e));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
