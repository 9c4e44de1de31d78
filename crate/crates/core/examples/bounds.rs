// Chernoff-type bounds on on/off keying and the numerical threshold A*.

use poisson_onebit::bounds::{a_star, lemma8_bounds, th4_condition, ExponentForm};
use poisson_onebit::constructions::th3_code;
use poisson_onebit::{exact_error, Channel, Result, TruncationSpec};

pub fn run_example() -> Result<f64> {
    let d = 0.25;
    let ch = Channel::memoryless(d)?;
    let ts = TruncationSpec::default();
    for n in [1, 2, 4] {
        for a in [1.0, 2.0, 4.0] {
            let b = lemma8_bounds(n, a, d)?;
            let e = exact_error(&th3_code(n, a)?, &ch, &ts)?.p_err;
            match b.upper_clamped {
                Some(u) => println!("N={n} A={a}: {:.3e} <= {e:.3e} <= {u:.3e}", b.lower),
                None => println!("N={n} A={a}: {:.3e} <= {e:.3e}, no upper bound below 2d", b.lower),
            }
        }
    }
    let (beta, big_n) = (2.5, 3);
    let found = a_star(
        |a| th4_condition(a, beta, d, big_n, ExponentForm::Printed).unwrap_or(false),
        1e-3,
        1e12,
        1e-6,
    )?;
    println!("A* (numerical) for beta={beta}, N={big_n}: {found:.6}");
    Ok(found)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
