//! Integrate the averaged, rescaled system for two values of epsilon and
//! compare each run with the full model mapped through the frame.

use hybrid_hopf::classifier::analyze_at;
use hybrid_hopf::models::builtin::SyntheticNormalForm;
use hybrid_hopf::models::JetSource;
use hybrid_hopf::verify::{compare_with_full, simulate_truncated, Truncation};
use hybrid_hopf::Result;

fn main() -> Result<()> {
    let m = SyntheticNormalForm { a: -1.0, b: 1.0, c: -1.0, d: 1.0, omega: 1.0 }.model()?;
    let a = analyze_at(&m, &[0.0; 3], JetSource::Exact)?;
    println!("{}", a.classification.summary());

    let mut devs = Vec::new();
    for eps in [0.1, 0.05] {
        let mut run = simulate_truncated(&a.coefficients, eps, 0.25, [0.6, 0.0], 10.0 / eps, Truncation::First)?;
        let end = run.trajectory.last().copied().unwrap_or_default();
        println!("eps {eps}: tau {:.1}, r {:.6}, z {:.6}, equilibrium {:?}", end[0], end[1], end[2], run.equilibrium);
        let d = compare_with_full(&mut run, &a.model, &a.frame)?;
        println!("  deviation from full model {d:.4e}");
        devs.push(d);
    }
    println!("ratio {:.3}", devs[0] / devs[1]);
    Ok(())
}
