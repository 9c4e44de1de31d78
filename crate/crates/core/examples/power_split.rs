// Error as the second codeword's power grows: the curve is not convex.

use poisson_onebit::constructions::th2_family;
use poisson_onebit::{exact_error, Channel, Result, TruncationSpec};

pub fn run_example() -> Result<Vec<(f64, f64)>> {
    let ch = Channel::new(vec![0.5, 0.5], 0.1)?;
    let ts = TruncationSpec::default();
    let p = 20.0;
    let mut curve = Vec::new();
    for i in 0..=20 {
        let x = i as f64;
        let e = exact_error(&th2_family(p, x)?, &ch, &ts)?.p_err;
        println!("x={x:>4} p_err={e:.4e}");
        curve.push((x, e));
    }
    Ok(curve)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
