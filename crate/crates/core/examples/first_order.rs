// Error gradient and first-order conditions at an optimum and elsewhere.

use poisson_onebit::optimizer::necessary_check;
use poisson_onebit::{d_vector, stationarity_coefficients, Channel, CodePair, PowerConstraints, Result, TruncationSpec};

pub fn run_example() -> Result<(bool, bool)> {
    let ch = Channel::new(vec![0.6, 0.4], 0.5)?;
    let pc = PowerConstraints::total_power(10.0)?;
    let ts = TruncationSpec::default();
    let mut verdicts = Vec::new();
    for cp in [
        CodePair::from_vecs(vec![10.0, 0.0], vec![0.0, 0.0])?,
        CodePair::from_vecs(vec![4.0, 3.0], vec![2.0, 1.0])?,
    ] {
        let d = d_vector(&cp, &ch, &ts)?;
        let c = stationarity_coefficients(&d, &ch)?;
        let report = necessary_check(&cp, &ch, &pc, 1e-4, &ts)?;
        println!("x1={:?} x2={:?}", cp.x1().as_slice(), cp.x2().as_slice());
        println!("  D={d:?}");
        println!("  c={c:?} nu={:?}", report.nu);
        for v in &report.violations {
            println!("  violated: x{} {} {:?} {}", v.codeword, v.kind, v.index, v.detail);
        }
        println!("  passed: {} ({})", report.passed(), report.note);
        verdicts.push(report.passed());
    }
    Ok((verdicts[0], verdicts[1]))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
