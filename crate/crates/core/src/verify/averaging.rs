//! Slow drift along the line and the rescaled truncated planar system.
//!
//! With `r = ε r̃`, `z = ε z̃`, `mu = ε² μ̃` and the time `τ` in which the angle
//! advances uniformly, `φ = ωτ`, the planar system reads
//!
//! ```text
//! r̃' = ε β2 r̃ z̃ + ε² (μ̃ γ3 r̃ + μ̃ γ4 z̃ + β3 r̃³ - (β1 β2 - β4) r̃ z̃²)
//! z̃' = ε (μ̃ γ5 + β5 r̃²) + ε² (μ̃ γ6 r̃ - μ̃ (β1 γ5 - γ7) z̃ - (β1 β5 - β6) r̃² z̃)
//! ```
//!
//! The first-order truncation keeps only the `ε` terms.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrate::{solve, SolverOptions, SWEEP_TOL};
use crate::coefficients::CylindricalCoefficients;
use crate::error::{Error, Result};
use crate::frame::StandardFrame;
use crate::models::Model;

/// Angles sampled by [`averaged_drift_check`].
pub const DRIFT_ANGLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub mu: f64,
    pub radius: f64,
    /// Mean of the frame `z` velocity over a circle about the line.
    pub mean_drift: f64,
    /// `β5 ρ² + γ5 μ`, when coefficients were supplied.
    pub predicted: Option<f64>,
    pub sign_matches: Option<bool>,
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Averages the frame `z` velocity over [`DRIFT_ANGLES`] points on a circle of
/// `radius` in the rotation plane.
pub fn averaged_drift_check(
    model: &Model,
    frame: &StandardFrame,
    coeffs: Option<&CylindricalCoefficients>,
    mu: f64,
    radius: f64,
) -> Result<DriftReport> {
    let inv = frame
        .basis_matrix()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParams("singular frame".into()))?;
    let mut sum = 0.0;
    for k in 0..DRIFT_ANGLES {
        let phi = 2.0 * PI * k as f64 / DRIFT_ANGLES as f64;
        let x = frame.from_frame(&Vector3::new(radius * phi.cos(), radius * phi.sin(), 0.0), mu);
        let w = inv * Vector3::from(model.evaluate(&x, mu)?);
        sum += w[2];
    }
    let mean_drift = sum / DRIFT_ANGLES as f64;
    let predicted = coeffs.map(|c| c.beta5 * radius * radius + c.gamma5 * mu);
    Ok(DriftReport {
        mu,
        radius,
        mean_drift,
        predicted,
        sign_matches: predicted.map(|p| sign(p) == sign(mean_drift)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    First,
    Second,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncatedRun {
    pub epsilon: f64,
    pub mu_tilde: f64,
    pub truncation: Truncation,
    pub coefficients: CylindricalCoefficients,
    /// `(τ, r̃, z̃)` at the accepted steps.
    pub trajectory: Vec<[f64; 3]>,
    /// `(r̃0, 0)` when `μ̃ β5 γ5 < 0`.
    pub equilibrium: Option<[f64; 2]>,
    /// Size of the first-order vector field at the equilibrium.
    pub equilibrium_residual: Option<f64>,
    /// Sup-norm deviation in `(r̃, z̃)` from the full model, once compared.
    pub full_deviation: Option<f64>,
    #[serde(skip)]
    solution: Option<super::integrate::Solution>,
}

impl TruncatedRun {
    /// `(r̃, z̃)` at time `τ` by dense output.
    pub fn state_at(&self, tau: f64) -> [f64; 2] {
        let v = self.solution.as_ref().expect("run has a solution").eval(tau);
        [v[0], v[1]]
    }

    pub fn horizon(&self) -> f64 {
        self.trajectory.last().map(|p| p[0]).unwrap_or(0.0)
    }
}

fn truncated_rhs(c: &CylindricalCoefficients, eps: f64, mt: f64, order: Truncation, tau: f64, r: f64, z: f64) -> [f64; 2] {
    let mut dr = eps * c.beta2 * r * z;
    let mut dz = eps * (mt * c.gamma5 + c.beta5 * r * r);
    if order == Truncation::Second {
        let phi = c.omega * tau;
        let e2 = eps * eps;
        dr += e2
            * (mt * c.gamma3.eval(phi) * r + mt * c.gamma4.eval(phi) * z + c.beta3 * r.powi(3)
                - (c.beta1 * c.beta2 - c.beta4) * r * z * z);
        dz += e2
            * (mt * c.gamma6.eval(phi) * r - mt * (c.beta1 * c.gamma5 - c.gamma7) * z
                - (c.beta1 * c.beta5 - c.beta6) * r * r * z);
    }
    [dr, dz]
}

/// Equilibrium `(r̃0, 0)` of the first-order system, if it exists.
pub fn truncated_equilibrium(c: &CylindricalCoefficients, mu_tilde: f64) -> Option<[f64; 2]> {
    let r2 = -mu_tilde * c.gamma5 / c.beta5;
    (r2 > 0.0).then(|| [r2.sqrt(), 0.0])
}

/// Linearization `ε A1` of the first-order system at `(r̃0, 0)` and its eigenvalues.
pub fn first_order_linearization(
    c: &CylindricalCoefficients,
    epsilon: f64,
    mu_tilde: f64,
) -> Option<(Matrix2<f64>, [Complex64; 2])> {
    let [r0, _] = truncated_equilibrium(c, mu_tilde)?;
    let a = epsilon * Matrix2::new(0.0, c.beta2 * r0, 2.0 * c.beta5 * r0, 0.0);
    // trace zero: eigenvalues ±sqrt(-det)
    let s = Complex64::new(-a.determinant(), 0.0).sqrt();
    Some((a, [s, -s]))
}

/// Integrates the truncated planar system from `x0 = (r̃, z̃)` over
/// `τ ∈ [0, horizon]`. Fails with `LeftDomain` when `|z̃| < r̃ < 1` is violated.
pub fn simulate_truncated(
    coeffs: &CylindricalCoefficients,
    epsilon: f64,
    mu_tilde: f64,
    x0: [f64; 2],
    horizon: f64,
    truncation: Truncation,
) -> Result<TruncatedRun> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidParams(format!("epsilon {epsilon} outside (0, 0.5]")));
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidParams("horizon must be positive".into()));
    }
    let inside = |r: f64, z: f64| z.abs() < r && r < 1.0;
    if !inside(x0[0], x0[1]) {
        return Err(Error::LeftDomain { tau: 0.0 });
    }
    let c = *coeffs;
    let rhs = |tau: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        let d = truncated_rhs(&c, epsilon, mu_tilde, truncation, tau, y[0], y[1]);
        out[0] = d[0];
        out[1] = d[1];
        Ok(())
    };
    let mut left = None;
    let opts = SolverOptions::with_tol(1e-12);
    let sol = solve(rhs, 0.0, &x0, horizon, &opts, |tau, y| {
        if !inside(y[0], y[1]) {
            left = Some(tau);
            true
        } else {
            false
        }
    })?;
    if let Some(tau) = left {
        return Err(Error::LeftDomain { tau });
    }
    let trajectory = sol.t.iter().zip(&sol.y).map(|(t, y)| [*t, y[0], y[1]]).collect();
    let equilibrium = truncated_equilibrium(&c, mu_tilde);
    let equilibrium_residual = equilibrium.map(|[r0, z0]| {
        let d = truncated_rhs(&c, epsilon, mu_tilde, Truncation::First, 0.0, r0, z0);
        d[0].hypot(d[1])
    });
    Ok(TruncatedRun {
        epsilon,
        mu_tilde,
        truncation,
        coefficients: c,
        trajectory,
        equilibrium,
        equilibrium_residual,
        full_deviation: None,
        solution: Some(sol),
    })
}

/// Integrates the full model from the point matching the run's initial state
/// (angle 0) and records the sup-norm deviation in `(r̃, z̃)`, with both
/// trajectories parametrized by the rotation angle `φ = ωτ`.
pub fn compare_with_full(run: &mut TruncatedRun, model: &Model, frame: &StandardFrame) -> Result<f64> {
    let eps = run.epsilon;
    let mu = eps * eps * run.mu_tilde;
    let omega = run.coefficients.omega;
    let [r0, z0] = run.state_at(0.0);
    let x0 = frame.from_frame(&Vector3::new(eps * r0, 0.0, eps * z0), mu);
    let phi_end = omega * run.horizon();

    let to_cyl = |y: &[f64]| -> (f64, f64, f64) {
        let w = frame.to_frame(&[y[0], y[1], y[2]], mu);
        (w[1].atan2(w[0]), w[0].hypot(w[1]) / eps, w[2] / eps)
    };

    // unwrapped angle at each accepted step
    let mut phis = vec![0.0];
    let mut last_angle = 0.0;
    let mut total = 0.0;
    let rhs = |_t: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        let f = model.evaluate(&[y[0], y[1], y[2]], mu)?;
        out[..3].copy_from_slice(&f);
        Ok(())
    };
    let t_max = 100.0 * phi_end / omega + 100.0;
    let opts = SolverOptions::with_tol(SWEEP_TOL * 1e-2);
    let sol = solve(rhs, 0.0, &x0, t_max, &opts, |_, y| {
        let (a, _, _) = to_cyl(y);
        let mut d = a - last_angle;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        total += d;
        last_angle = a;
        phis.push(total);
        total >= phi_end
    })?;
    if !sol.stopped {
        return Err(Error::StepFailure { t: sol.t_end() });
    }

    // compare on a refined grid inside each step
    const SUB: usize = 8;
    let mut worst: f64 = 0.0;
    for k in 0..sol.t.len() - 1 {
        for j in 0..SUB {
            let t = sol.t[k] + (sol.t[k + 1] - sol.t[k]) * j as f64 / SUB as f64;
            let y = sol.eval(t);
            let (a, r, z) = to_cyl(&y);
            // unwrapped angle near the step's start
            let base = phis[k];
            let mut d = a - base.rem_euclid(2.0 * PI);
            d = (d + PI).rem_euclid(2.0 * PI) - PI;
            let phi = base + d;
            if phi > phi_end || phi < 0.0 {
                continue;
            }
            let [rt, zt] = run.state_at(phi / omega);
            worst = worst.max((r - rt).abs().max((z - zt).abs()));
        }
    }
    run.full_deviation = Some(worst);
    Ok(worst)
}
