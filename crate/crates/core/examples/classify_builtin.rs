//! Classify the built-in models at their Hopf points and print the
//! assumption tables. `classical_hopf` has no drift along the line and is
//! rejected.

use hybrid_hopf::classifier::analyze_model;
use hybrid_hopf::models::builtin::{ClassicalHopf, SyntheticNormalForm, ToyCylindrical};
use hybrid_hopf::models::JetSource;
use hybrid_hopf::Result;

fn main() -> Result<()> {
    let models = [
        SyntheticNormalForm { a: -1.0, b: 1.0, c: -1.0, d: 1.0, omega: 1.0 }.model()?,
        SyntheticNormalForm { a: -1.0, b: 1.0, c: 1.0, d: 0.0, omega: 1.0 }.model()?,
        ToyCylindrical {
            omega: 2.0,
            beta2: 1.0,
            beta3: 0.0,
            beta4: 0.0,
            beta5: 1.0,
            beta6: 0.0,
            gamma3: 0.0,
            gamma5: -1.0,
            gamma7: 1.0,
        }
        .model()?,
        ClassicalHopf { sign: -1.0, omega: 1.0 }.model()?,
    ];
    for m in &models {
        println!("== {} {:?}", m.name, m.params);
        match analyze_model(m, &[0.0; 3], JetSource::Exact) {
            Ok(a) => {
                println!("{}", a.report.table());
                println!("{}", a.classification.summary());
                let c = &a.coefficients;
                println!("beta2 {:+.4} beta5 {:+.4} gamma5 {:+.4} gamma7 {:+.4}\n", c.beta2, c.beta5, c.gamma5, c.gamma7);
            }
            Err(e) => println!("rejected: {e}\n"),
        }
    }
    Ok(())
}
