// Anti-Robin Hood paths between majorization-ordered sequences.

use poisson_onebit::majorization::{ar_path, lemma6_cap, majorizes, replay};
use poisson_onebit::Result;

pub fn run_example() -> Result<usize> {
    let from = [3.0, 2.0, 1.0, 0.0];
    let to = [5.0, 1.0, 0.0, 0.0];
    println!("{to:?} majorizes {from:?}: {}", majorizes(&to, &from)?);
    let ops = ar_path(&from, &to)?;
    let mut cur = from.to_vec();
    for op in &ops {
        cur = replay(&cur, std::slice::from_ref(op))?;
        println!("  move {:.3} from slot {} to slot {} -> {cur:?}", op.eps, op.j, op.i);
    }
    let cap = lemma6_cap(&[0.3, 0.3, 0.2], &[0.5, 0.3, 0.2])?;
    println!("cap of [0.3, 0.3, 0.2] under [0.5, 0.3, 0.2]: {:?} (t = {:?})", cap.capped, cap.t);
    Ok(ops.len())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
