// Exact error of the two length-2 candidates on a memory-2 channel.

use poisson_onebit::constructions::example6_code;
use poisson_onebit::{decision_rule, exact_error, intensities, Channel, Result, TruncationSpec};

pub fn run_example() -> Result<Vec<f64>> {
    let ch = Channel::new(vec![0.6, 0.4], 0.5)?;
    let ts = TruncationSpec::default();
    let mut errors = Vec::new();
    for variant in [1, 2] {
        let cp = example6_code(variant, 10.0)?;
        let ip = intensities(&cp, &ch);
        let rule = decision_rule(&ip, ch.d())?;
        let e = exact_error(&cp, &ch, &ts)?;
        println!(
            "variant {variant}: x1={:?} x2={:?}",
            cp.x1().as_slice(),
            cp.x2().as_slice()
        );
        println!("  lambda={:?} mu={:?}", ip.lambda, ip.mu);
        println!("  weights={:?} threshold={}", rule.weights(), rule.threshold());
        println!("  p_err={:.6} (+/- {:.0e}), ties flagged: {}", e.p_err, e.truncation_bound, e.tie_flag);
        errors.push(e.p_err);
    }
    Ok(errors)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
