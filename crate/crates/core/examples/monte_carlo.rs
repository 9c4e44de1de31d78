// Monte Carlo estimate next to the exact value.

use poisson_onebit::{exact_error, mc_error, Channel, CodePair, Result, TruncationSpec};

pub fn run_example() -> Result<(f64, f64, f64)> {
    let ch = Channel::new(vec![0.7, 0.2, 0.1], 0.4)?;
    let cp = CodePair::from_vecs(vec![3.0, 0.0, 1.0], vec![0.0, 2.0, 0.0])?;
    let exact = exact_error(&cp, &ch, &TruncationSpec::default())?;
    let mc = mc_error(&cp, &ch, 100_000, 7)?;
    let se = mc.std_error.unwrap_or(0.0);
    println!("exact {:.6}", exact.p_err);
    println!("monte carlo {:.6} (se {se:.2e}, 95% reach {:.2e})", mc.p_err, mc.truncation_bound);
    Ok((exact.p_err, mc.p_err, se))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
