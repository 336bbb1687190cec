//! Continue the stable cycle born at the Hopf point of the predator-prey
//! model and check it against the square-root law and Floquet theory.
//!
//! Run with `--release`; the eight shooting solves take a few seconds in a
//! debug build.

use hybrid_hopf::classifier::analyze_at;
use hybrid_hopf::eco::{self, EcoParams};
use hybrid_hopf::models::JetSource;
use hybrid_hopf::verify::{continue_branch, floquet_stability, log_grid};
use hybrid_hopf::Result;

fn main() -> Result<()> {
    let p = EcoParams::new(1.0, 1.0, 0.3, 0.2, 0.6);
    let x_h = eco::hopf_point(&p)?;
    let a = analyze_at(&p.model()?, &x_h, JetSource::Exact)?;
    println!("Hopf point {x_h:?}");
    println!("{}", a.classification.summary());

    let branch = continue_branch(&a, &log_grid(5e-4, 2e-2, 8))?;
    println!("{:>10} {:>10} {:>10} {:>10} {:>10}", "mu", "amplitude", "predicted", "period", "max|k|");
    for q in &branch.points {
        let pred = a.predict(q.mu).map(|o| o.r0).unwrap_or(f64::NAN);
        let v = floquet_stability(&q.orbit);
        let k = v.nontrivial_moduli[0].max(v.nontrivial_moduli[1]);
        println!("{:>10.3e} {:>10.5} {:>10.5} {:>10.5} {:>10.6}", q.mu, q.amplitude, pred, q.period, k);
    }
    if let Some(f) = branch.fit {
        println!("amplitude ~ {:.4} |mu|^{:.4}", f.constant, f.exponent);
    }
    if let Some(l) = &branch.lost {
        println!("lost at mu = {}: {}", l.mu, l.reason);
    }
    Ok(())
}
