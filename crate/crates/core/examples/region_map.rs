// Winner map between the two short-block candidates, driven through the CLI.

pub fn run_example() -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = poisson_onebit::cli::run(
        ["poisson-onebit", "region", "--grid", "11", "--P", "10", "--d", "0.5"],
        &mut out,
        &mut err,
    );
    if code != 0 {
        return Err(String::from_utf8_lossy(&err).into_owned());
    }
    let csv = String::from_utf8(out).map_err(|e| e.to_string())?;
    // one output row per pi0 value, pi1 increasing to the right
    let mut row = None;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if row.is_some() && row != Some(f[0]) {
            println!();
        }
        row = Some(f[0]);
        print!("{}", if f[2] == "1" { '1' } else { '.' });
    }
    println!();
    Ok(csv)
}

#[allow(dead_code)]
fn main() -> Result<(), String> {
    run_example().map(|_| ())
}
