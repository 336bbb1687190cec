//! Sample the admissible predator-prey region and classify every sample.
//! Usage: `eco_sweep [samples] [seed]`.

use hybrid_hopf::eco::{self, DeltaBounds};
use hybrid_hopf::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let samples = eco::sample_region(n, seed, DeltaBounds::default())?;
    let rows = eco::sweep(&samples)?;
    let non_es = rows.iter().filter(|r| !r.is_es()).count();
    let worst = rows.iter().map(|r| r.margin).fold(f64::NEG_INFINITY, f64::max);
    let sigma = rows.iter().map(|r| r.sigma).fold(f64::NEG_INFINITY, f64::max);
    println!("{n} samples (seed {seed}): {non_es} not ES");
    println!("largest stability margin {worst:.3e}, largest sigma {sigma:.3e}");

    let r = &rows[0];
    println!(
        "first row: delta = ({:.3}, {:.3}) lambda {:.3} alpha = ({:.3}, {:.3}) -> {:?}",
        r.params.delta1, r.params.delta2, r.params.lambda, r.params.alpha1, r.params.alpha2, r.outcome
    );
    if std::env::var_os("SWEEP_CSV").is_some() {
        print!("{}", eco::sweep_table(&rows));
    }
    Ok(())
}
