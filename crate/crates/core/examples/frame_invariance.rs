//! Recompute the classification in randomly rotated and rescaled frames.
//! The coefficients change; xi, the direction and the sign of sigma do not.

use std::f64::consts::PI;

use hybrid_hopf::classifier::{analyze_at, classify};
use hybrid_hopf::coefficients::compute_coefficients;
use hybrid_hopf::eco::{self, EcoParams};
use hybrid_hopf::models::JetSource;
use hybrid_hopf::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let p = EcoParams::new(1.0, 1.0, 0.3, 0.2, 0.6);
    let a = analyze_at(&p.model()?, &eco::hopf_point(&p)?, JetSource::Exact)?;
    let k0 = a.classification;
    println!("reference: xi {} direction {} sigma {:.6e}", k0.xi, k0.direction, k0.sigma);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..8 {
        let (theta, plane, line) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0));
        let g = a.frame.perturbed(&a.jet, theta, plane, line)?;
        let c = compute_coefficients(&g.standard_jet(&a.jet)?)?;
        let k = classify(&c)?;
        println!(
            "theta {theta:.3} scales ({plane:.2}, {line:.2}): beta5 {:+.4} gamma5 {:+.4} sigma {:+.3e} -> {}",
            c.beta5, c.gamma5, k.sigma, k.kind
        );
    }
    Ok(())
}
