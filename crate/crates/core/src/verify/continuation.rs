//! Natural continuation of the periodic branch in the parameter.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::integrate::ORBIT_TOL;
use super::shooting::{find_periodic_orbit_tol, OrbitSeed, PeriodicOrbit};
use crate::classifier::Analysis;
use crate::error::{Error, Result};
use crate::models::State;

/// Accepted orbit periods, as multiples of `2π/ω`.
pub const PERIOD_WINDOW: (f64, f64) = (0.5, 2.0);
/// Number of smallest-|mu| points used by the scaling fit.
pub const FIT_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub mu: f64,
    pub orbit: PeriodicOrbit,
    /// Largest distance from the line in the rotation plane, frame units.
    pub amplitude: f64,
    pub period: f64,
}

/// `amplitude ≈ constant · |mu|^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub constant: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchLoss {
    pub mu: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    /// Absent when fewer than two points were computed.
    pub fit: Option<ScalingFit>,
    /// Where and why continuation stopped early.
    pub lost: Option<BranchLoss>,
}

impl Branch {
    /// `Err(BranchLost)` if continuation stopped before the end of the grid.
    pub fn complete(&self) -> Result<()> {
        match &self.lost {
            Some(l) => Err(Error::BranchLost { mu: l.mu, reason: l.reason.clone() }),
            None => Ok(()),
        }
    }
}

/// Amplitude of an orbit in frame units.
pub fn orbit_amplitude(analysis: &Analysis, orbit: &PeriodicOrbit) -> f64 {
    orbit
        .samples
        .iter()
        .map(|(_, x)| analysis.frame.to_frame(x, orbit.mu).fixed_rows::<2>(0).norm())
        .fold(0.0, f64::max)
}

/// Least-squares line through `(ln|mu|, ln amplitude)` over the smallest
/// [`FIT_POINTS`] values of `|mu|`.
pub fn fit_scaling(points: &[(f64, f64)]) -> Option<ScalingFit> {
    let mut pts: Vec<(f64, f64)> = points.iter().filter(|(m, a)| *m != 0.0 && *a > 0.0).copied().collect();
    pts.sort_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap());
    pts.truncate(FIT_POINTS);
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|(m, _)| m.abs().ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, a)| a.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let p = sxy / sxx;
    Some(ScalingFit { exponent: p, constant: (my - p * mx).exp(), points: pts.len() })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty parameter grid".into()));
    }
    if grid.iter().any(|m| !m.is_finite() || *m == 0.0) {
        return Err(Error::InvalidParams("grid values must be finite and nonzero".into()));
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidParams("grid must be strictly monotone".into()));
    }
    Ok(())
}

/// Continues the branch over `mu_grid`, starting from the classifier's
/// prediction at the first grid value. Subsequent seeds come from a secant
/// predictor through the last two orbits, with the classifier prediction as
/// fallback. The first failed solve ends the branch; earlier points are kept.
pub fn continue_branch(analysis: &Analysis, mu_grid: &[f64]) -> Result<Branch> {
    continue_branch_tol(analysis, mu_grid, ORBIT_TOL)
}

/// As [`continue_branch`] with integrator tolerance `tol`.
pub fn continue_branch_tol(analysis: &Analysis, mu_grid: &[f64], tol: f64) -> Result<Branch> {
    check_grid(mu_grid)?;
    let model = &analysis.model;
    let mut points: Vec<BranchPoint> = Vec::new();
    let mut lost = None;
    let t0 = 2.0 * std::f64::consts::PI / analysis.coefficients.omega;

    for &mu in mu_grid {
        let predicted = analysis.predict(mu);
        let mut seeds: Vec<OrbitSeed> = Vec::new();
        match points.len() {
            0 => {}
            1 => {
                // scale the previous orbit about the line with the square-root law
                let prev = &points[0];
                let ratio = (mu / prev.mu).abs().sqrt();
                let w = analysis.frame.to_frame(&prev.orbit.anchor_state, prev.mu);
                let wn = Vector3::new(w[0] * ratio, w[1] * ratio, w[2] * ratio * ratio);
                seeds.push(OrbitSeed { state: analysis.frame.from_frame(&wn, mu), period: prev.period });
            }
            n => {
                let (a, b) = (&points[n - 2], &points[n - 1]);
                let s = (mu - b.mu) / (b.mu - a.mu);
                let xa = Vector3::from(a.orbit.anchor_state);
                let xb = Vector3::from(b.orbit.anchor_state);
                let x = xb + s * (xb - xa);
                let period = b.period + s * (b.period - a.period);
                seeds.push(OrbitSeed { state: [x[0], x[1], x[2]], period });
            }
        }
        match &predicted {
            Ok(p) => seeds.push(OrbitSeed::from(p)),
            Err(e) if points.is_empty() => {
                lost = Some(BranchLoss { mu, reason: e.to_string() });
                break;
            }
            Err(_) => {}
        }

        let mut last_err = None;
        let mut found = None;
        for seed in &seeds {
            match find_periodic_orbit_tol(model, mu, seed, tol) {
                Ok(o) if !(o.period > t0 * PERIOD_WINDOW.0 && o.period < t0 * PERIOD_WINDOW.1) => {
                    last_err = Some(Error::BranchLost { mu, reason: format!("period {} outside the window", o.period) });
                }
                Ok(o) => {
                    found = Some(o);
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        match found {
            Some(orbit) => {
                let amplitude = orbit_amplitude(analysis, &orbit);
                let period = orbit.period;
                points.push(BranchPoint { mu, orbit, amplitude, period });
            }
            None => {
                let reason = last_err.map(|e| e.to_string()).unwrap_or_else(|| "no seed".into());
                lost = Some(BranchLoss { mu, reason });
                break;
            }
        }
    }
    let fit = fit_scaling(&points.iter().map(|p| (p.mu, p.amplitude)).collect::<Vec<_>>());
    Ok(Branch { points, fit, lost })
}

/// `count` log-spaced values from `lo` to `hi` (same sign, inclusive).
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let sign = lo.signum();
    let (a, b) = (lo.abs().ln(), hi.abs().ln());
    (0..count)
        .map(|k| sign * (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Distance of `x` from the Hopf point, for reporting.
pub fn distance_from(x: &State, center: &State) -> f64 {
    (Vector3::from(*x) - Vector3::from(*center)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::analyze_model;
    use crate::models::builtin::SyntheticNormalForm;
    use crate::models::JetSource;

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [1e-3f64, 2e-3, 4e-3, 8e-3, 1.6e-2].iter().map(|&m| (m, 3.0 * m.powf(0.5))).collect();
        let f = fit_scaling(&pts).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-12);
        assert!((f.constant - 3.0).abs() < 1e-10);
        assert_eq!(f.points, FIT_POINTS);
        assert!(fit_scaling(&pts[..1]).is_none());
    }

    #[test]
    fn grid_validation() {
        assert!(check_grid(&[]).is_err());
        assert!(check_grid(&[0.1, 0.1]).is_err());
        assert!(check_grid(&[0.1, 0.0]).is_err());
        assert!(check_grid(&[0.3, 0.2, 0.1]).is_ok());
        let g = log_grid(5e-4, 2e-2, 8);
        assert_eq!(g.len(), 8);
        assert!((g[0] - 5e-4).abs() < 1e-18 && (g[7] - 2e-2).abs() < 1e-15);
    }

    #[test]
    fn synthetic_branch_and_wrong_direction() {
        let m = SyntheticNormalForm { a: -1.0, b: 1.0, c: -1.0, d: -1.0, omega: 1.0 }.model().unwrap();
        let a = analyze_model(&m, &[0.0; 3], JetSource::Exact).unwrap();
        let b = continue_branch(&a, &log_grid(1e-3, 1e-2, 5)).unwrap();
        assert!(b.lost.is_none(), "{:?}", b.lost);
        assert_eq!(b.points.len(), 5);
        assert!((b.fit.unwrap().exponent - 0.5).abs() < 0.01);
        let wrong = continue_branch(&a, &[-1e-3, -2e-3]).unwrap();
        assert!(wrong.points.is_empty());
        assert!(matches!(wrong.complete(), Err(Error::BranchLost { .. })));
    }
}
