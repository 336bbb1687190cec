//! Classify a user-supplied polynomial field read from a TOML file and
//! check the prediction with a periodic orbit.
//! Usage: `polynomial_model [config.toml]`.

use std::path::PathBuf;

use hybrid_hopf::classifier::analyze_model;
use hybrid_hopf::cli::RunConfig;
use hybrid_hopf::models::JetSource;
use hybrid_hopf::verify::{find_periodic_orbit, floquet_stability, OrbitSeed};
use hybrid_hopf::{Error, Result};

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/rotating_drift.toml"));
    let cfg = RunConfig::load(&path)?;
    let model = cfg.model.ok_or_else(|| Error::Config("config has no [model]".into()))?.build()?;

    let a = analyze_model(&model, &[0.0; 3], JetSource::Exact)?;
    println!("{}", a.report.table());
    println!("{}", a.classification.summary());

    let mu = 0.01 * a.classification.direction as f64;
    let pred = a.predict(mu)?;
    let orbit = find_periodic_orbit(&model, mu, &OrbitSeed::from(&pred))?;
    let v = floquet_stability(&orbit);
    println!("mu {mu}: predicted period {:.5}, found {:.5}", pred.period, orbit.period);
    println!("nontrivial |kappa| {:?}, stable {}", v.nontrivial_moduli, v.stable);
    Ok(())
}
