//! Periodic orbits by full-period shooting, and their Floquet multipliers.

use nalgebra::{Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrate::{integrate_variational, ORBIT_TOL};
use crate::classifier::PredictedOrbit;
use crate::error::{Error, Result};
use crate::models::{Model, State};

/// Shooting residual required for convergence.
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const MAX_NEWTON: usize = 30;
/// Samples stored per orbit.
pub const ORBIT_SAMPLES: usize = 200;
/// Solutions that move less than this over half a period are equilibria.
pub const EQUILIBRIUM_SPREAD: f64 = 1e-8;
/// Nontrivial multipliers count as stable below `1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-6;

/// Starting guess for the shooting solve; the phase condition is the plane
/// through `state` normal to the flow there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSeed {
    pub state: State,
    pub period: f64,
}

impl From<&PredictedOrbit> for OrbitSeed {
    fn from(p: &PredictedOrbit) -> Self {
        OrbitSeed { state: p.state_estimate[0], period: p.period }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub mu: f64,
    pub anchor_state: State,
    pub period: f64,
    /// `(t, x)` over one period, uniformly spaced and including both ends.
    pub samples: Vec<(f64, State)>,
    /// Multipliers as `[re, im]`, trivial one first, then by decreasing modulus.
    pub floquet: [[f64; 2]; 3],
    pub residual: f64,
    /// `exp(∫ tr D_x F dt)` over one period.
    pub liouville: f64,
    pub newton_iterations: usize,
}

impl PeriodicOrbit {
    pub fn multipliers(&self) -> [Complex64; 3] {
        self.floquet.map(|[re, im]| Complex64::new(re, im))
    }

    /// `|prod κ - exp(∫ tr)| / exp(∫ tr)`.
    pub fn liouville_defect(&self) -> f64 {
        let p = self.multipliers().iter().product::<Complex64>();
        (p - self.liouville).norm() / self.liouville.abs()
    }

    pub fn trivial_defect(&self) -> f64 {
        (self.multipliers()[0] - 1.0).norm()
    }
}

/// Orders multipliers with the one closest to 1 first.
fn order_multipliers(ev: [Complex64; 3]) -> [[f64; 2]; 3] {
    let mut v = ev.to_vec();
    let i = (0..3)
        .min_by(|&a, &b| (v[a] - 1.0).norm().partial_cmp(&(v[b] - 1.0).norm()).unwrap())
        .unwrap();
    let trivial = v.remove(i);
    v.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap().then(b.im.partial_cmp(&a.im).unwrap()));
    [trivial, v[0], v[1]].map(|c| [c.re, c.im])
}

/// Newton iteration on `Φ_T(X) = X` with the phase condition
/// `(X - seed)·F(seed) = 0`, solving for the state and the period together.
pub fn find_periodic_orbit(model: &Model, mu: f64, seed: &OrbitSeed) -> Result<PeriodicOrbit> {
    find_periodic_orbit_tol(model, mu, seed, ORBIT_TOL)
}

/// As [`find_periodic_orbit`] with integrator tolerance `tol`.
pub fn find_periodic_orbit_tol(model: &Model, mu: f64, seed: &OrbitSeed, tol: f64) -> Result<PeriodicOrbit> {
    let f_seed = Vector3::from(model.evaluate(&seed.state, mu)?);
    if f_seed.norm() == 0.0 {
        return Err(Error::SingularShooting);
    }
    let x_seed = Vector3::from(seed.state);
    let mut x = x_seed;
    let mut period = seed.period;
    if !(period > 0.0) {
        return Err(Error::InvalidParams("seed period must be positive".into()));
    }

    let shoot = |x: &Vector3<f64>, period: f64| -> Result<(Vector4<f64>, super::integrate::VariationalFlow)> {
        let flow = integrate_variational(model, mu, &[x[0], x[1], x[2]], period, tol)?;
        let end = Vector3::from(flow.end);
        let g = end - x;
        let phase = (x - x_seed).dot(&f_seed);
        Ok((Vector4::new(g[0], g[1], g[2], phase), flow))
    };

    let (mut res, mut flow) = shoot(&x, period)?;
    let mut last = f64::INFINITY;
    for iter in 0..MAX_NEWTON {
        let gnorm = res.fixed_rows::<3>(0).norm();
        last = gnorm;
        if gnorm < RESIDUAL_TOL && res[3].abs() < RESIDUAL_TOL * f_seed.norm().max(1.0) {
            return finish(model, mu, x, period, &flow, gnorm, iter);
        }
        let f_end = Vector3::from(model.evaluate(&flow.end, mu)?);
        let mut jac = Matrix4::zeros();
        for r in 0..3 {
            for c in 0..3 {
                jac[(r, c)] = flow.monodromy[(r, c)] - if r == c { 1.0 } else { 0.0 };
            }
            jac[(r, 3)] = f_end[r];
            jac[(3, r)] = f_seed[r];
        }
        let svd = jac.svd(false, false);
        let smax = svd.singular_values.max();
        if !(svd.singular_values.min() > 1e-13 * smax) {
            return Err(Error::SingularShooting);
        }
        let step = jac.lu().solve(&(-res)).ok_or(Error::SingularShooting)?;

        // damped update: halve until the residual decreases
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let xn = x + lambda * step.fixed_rows::<3>(0);
            let pn = period + lambda * step[3];
            if pn > 0.0 && model.admissible(&[xn[0], xn[1], xn[2]]) {
                if let Ok((rn, fl)) = shoot(&xn, pn) {
                    if rn.norm() < res.norm() || rn.fixed_rows::<3>(0).norm() < RESIDUAL_TOL {
                        x = xn;
                        period = pn;
                        res = rn;
                        flow = fl;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_NEWTON, residual: last })
}

fn finish(
    model: &Model,
    mu: f64,
    x: Vector3<f64>,
    period: f64,
    flow: &super::integrate::VariationalFlow,
    residual: f64,
    iterations: usize,
) -> Result<PeriodicOrbit> {
    // every period solves the shooting equations at an equilibrium
    let mid = flow.solution.eval(0.5 * period);
    let spread = (Vector3::new(mid[0], mid[1], mid[2]) - x).norm();
    if spread < EQUILIBRIUM_SPREAD * x.norm().max(1.0) {
        return Err(Error::SingularShooting);
    }
    let ev = flow.monodromy.complex_eigenvalues();
    let floquet = order_multipliers([ev[0], ev[1], ev[2]]);
    let samples = (0..ORBIT_SAMPLES)
        .map(|k| {
            let t = period * k as f64 / (ORBIT_SAMPLES - 1) as f64;
            let v = flow.solution.eval(t);
            (t, [v[0], v[1], v[2]])
        })
        .collect();
    let _ = model;
    Ok(PeriodicOrbit {
        mu,
        anchor_state: [x[0], x[1], x[2]],
        period,
        samples,
        floquet,
        residual,
        liouville: flow.trace_integral.exp(),
        newton_iterations: iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Nontrivial multipliers outside the unit circle.
    pub unstable_dimension: usize,
    pub nontrivial_moduli: [f64; 2],
    pub trivial_defect: f64,
}

pub fn floquet_stability(orbit: &PeriodicOrbit) -> StabilityVerdict {
    let m = orbit.multipliers();
    let moduli = [m[1].norm(), m[2].norm()];
    StabilityVerdict {
        stable: moduli.iter().all(|&r| r < 1.0 - STABILITY_MARGIN),
        unstable_dimension: moduli.iter().filter(|&&r| r > 1.0 + STABILITY_MARGIN).count(),
        nontrivial_moduli: moduli,
        trivial_defect: orbit.trivial_defect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::analyze_model;
    use crate::models::builtin::{PredatorPrey, SyntheticNormalForm, ToyCylindrical};
    use crate::models::JetSource;
    use std::f64::consts::PI;

    fn pp() -> Model {
        PredatorPrey { delta1: 1.0, delta2: 1.0, lambda: 0.3, alpha1: 0.2, alpha2: 0.6 }.model().unwrap()
    }

    #[test]
    fn predator_prey_orbit_is_stable() {
        let m = pp();
        let a = analyze_model(&m, &[0.125, 0.405, 0.3], JetSource::Exact).unwrap();
        let p = a.predict(0.005).unwrap();
        let orbit = find_periodic_orbit(&m, 0.005, &OrbitSeed::from(&p)).unwrap();
        assert!(orbit.residual < RESIDUAL_TOL);
        assert!((orbit.period / p.period - 1.0).abs() < 0.02, "{} vs {}", orbit.period, p.period);
        let v = floquet_stability(&orbit);
        assert!(v.stable, "{v:?}");
        assert!(v.trivial_defect < 1e-3);
        assert!(orbit.liouville_defect() < 1e-6, "{}", orbit.liouville_defect());
        let amp = orbit
            .samples
            .iter()
            .map(|(_, x)| a.frame.to_frame(x, 0.005).fixed_rows::<2>(0).norm())
            .fold(0.0, f64::max);
        assert!((amp / p.r0 - 1.0).abs() < 0.15, "{amp} vs {}", p.r0);
    }

    #[test]
    fn anchor_choice_does_not_matter() {
        let m = pp();
        let a = analyze_model(&m, &[0.125, 0.405, 0.3], JetSource::Exact).unwrap();
        let p = a.predict(0.005).unwrap();
        let reference = find_periodic_orbit(&m, 0.005, &OrbitSeed::from(&p)).unwrap();
        for k in 1..8 {
            let seed = OrbitSeed { state: p.state_estimate[8 * k], period: p.period };
            let o = find_periodic_orbit(&m, 0.005, &seed).unwrap();
            assert!((o.period / reference.period - 1.0).abs() < 1e-6);
            assert!(o.residual < RESIDUAL_TOL);
        }
    }

    #[test]
    fn hyperbolic_orbit_is_unstable() {
        let m = SyntheticNormalForm { a: 1.0, b: 1.0, c: -1.0, d: 0.0, omega: 1.0 }.model().unwrap();
        let a = analyze_model(&m, &[0.0; 3], JetSource::Exact).unwrap();
        let p = a.predict(0.01).unwrap();
        let o = find_periodic_orbit(&m, 0.01, &OrbitSeed::from(&p)).unwrap();
        let v = floquet_stability(&o);
        assert!(!v.stable);
        assert_eq!(v.unstable_dimension, 1);
        assert!((o.period - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn planted_orbit_period() {
        let toy = ToyCylindrical {
            omega: 1.7,
            beta2: -1.0,
            beta3: 0.0,
            beta4: 0.0,
            beta5: 2.0,
            beta6: 0.0,
            gamma3: 0.0,
            gamma5: -1.0,
            gamma7: -0.5,
        };
        let m = toy.model().unwrap();
        let mu = 0.02;
        let r0 = (mu * 1.0 / 2.0f64).sqrt();
        let seed = OrbitSeed { state: [r0 * 1.01, 0.0, 0.001], period: 2.0 * PI / 1.7 * 1.01 };
        let o = find_periodic_orbit(&m, mu, &seed).unwrap();
        assert!((o.period - 2.0 * PI / 1.7).abs() < 1e-8, "{}", o.period);
        let r = (o.anchor_state[0].powi(2) + o.anchor_state[1].powi(2)).sqrt();
        assert!((r - r0).abs() < 1e-8);
    }
}
