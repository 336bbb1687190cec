//! Boundary equilibria of the predator-prey model and the Lyapunov function
//! that is conserved when the two predators share one death rate.

use hybrid_hopf::eco::{self, EcoParams};
use hybrid_hopf::verify::integrate;
use hybrid_hopf::Result;

fn main() -> Result<()> {
    let p = EcoParams::new(1.0, 1.0, 0.3, 0.2, 0.6);
    let b = eco::boundary_report(&p)?;
    for (i, x) in b.equilibria.iter().enumerate() {
        println!("E{i} = [{:.4}, {:.4}, {:.4}]", x[0], x[1], x[2]);
    }
    println!("Hopf indicators {:?}, drift sign {}", b.hopf_indicators, b.lyapunov_drift_sign);

    for alpha2 in [0.2, 0.6] {
        let q = EcoParams { alpha2, ..p };
        let x0 = [0.2, 0.3, 0.5];
        let traj = integrate(&q.model()?, 0.0, &x0, (0.0, 50.0), 1e-11)?;
        let v0 = eco::lyapunov(&q, &x0);
        let v1 = traj.states().last().map(|x| eco::lyapunov(&q, &x)).unwrap_or(v0);
        println!("alpha2 = {alpha2}: V(0) = {v0:.6}, V(50) = {v1:.6}");
    }
    Ok(())
}
