//! Bifurcation type, direction and predicted orbit geometry.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::coefficients::{compute_coefficients, CylindricalCoefficients};
use crate::error::{Error, Result};
use crate::frame::{self, AssumptionReport, StandardFrame, NONZERO};
use crate::models::{JetSource, JetTable, Model, State};

/// Relative tolerance for treating the stability coefficient as zero.
pub const SIGMA_REL_TOL: f64 = 1e-9;
/// Safety factor of the advertised parameter trust region `|mu| < factor |β5/γ5|`.
pub const MU_VALIDITY_FACTOR: f64 = 0.1;
/// Points on the predicted circle.
pub const CIRCLE_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopfKind {
    Hyperbolic,
    Elliptic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BifurcationType {
    /// Hyperbolic: the bifurcating orbits have a two-dimensional unstable manifold.
    H,
    /// Elliptic, orbits locally exponentially stable.
    ES,
    /// Elliptic, orbits with a three-dimensional unstable manifold.
    EU,
    /// Elliptic with vanishing stability coefficient: a stability boundary.
    Degenerate,
}

impl fmt::Display for BifurcationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BifurcationType::H => "Type-H",
            BifurcationType::ES => "Type-ES",
            BifurcationType::EU => "Type-EU",
            BifurcationType::Degenerate => "Degenerate",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    /// `sign(β2 β5)`.
    pub xi: i8,
    pub hopf_kind: HopfKind,
    /// Sign of `mu` on which the periodic branch exists.
    pub direction: i8,
    /// `2β3γ5² - β5γ5γ7 + β6γ5²`.
    pub sigma: f64,
    pub sigma_tol: f64,
    #[serde(rename = "type")]
    pub kind: BifurcationType,
    pub omega: f64,
    /// Heuristic trust region `|mu| < 0.1 |β5/γ5|`.
    pub mu_validity_hint: f64,
}

impl Classification {
    pub fn summary(&self) -> String {
        format!(
            "{} ({:?}), branch for sign(mu) = {:+}, xi = {:+}, sigma = {:.6e}, omega = {:.6}, heuristic |mu| < {:.3e}",
            self.kind, self.hopf_kind, self.direction, self.xi, self.sigma, self.omega, self.mu_validity_hint
        )
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

pub fn stability_coefficient(c: &CylindricalCoefficients) -> f64 {
    let g2 = c.gamma5 * c.gamma5;
    2.0 * c.beta3 * g2 - c.beta5 * c.gamma5 * c.gamma7 + c.beta6 * g2
}

/// Tolerance below which the stability coefficient counts as zero.
pub fn sigma_tolerance(c: &CylindricalCoefficients) -> f64 {
    let g2 = c.gamma5 * c.gamma5;
    SIGMA_REL_TOL
        * (2.0 * c.beta3 * g2)
            .abs()
            .max((c.beta5 * c.gamma5 * c.gamma7).abs())
            .max((c.beta6 * g2).abs())
            .max(1e-300)
}

pub fn classify(c: &CylindricalCoefficients) -> Result<Classification> {
    let mut small = Vec::new();
    for (name, v) in [("beta2", c.beta2), ("beta5", c.beta5), ("gamma5", c.gamma5)] {
        if !(v.abs() > NONZERO) {
            small.push(format!("{name} = {v:e}"));
        }
    }
    if !small.is_empty() {
        return Err(Error::AssumptionViolation(small.join(", ")));
    }
    let xi = sign(c.beta2 * c.beta5);
    let direction = -sign(c.beta5 * c.gamma5);
    let sigma = stability_coefficient(c);
    let tol = sigma_tolerance(c);
    let kind = if xi == 1 {
        BifurcationType::H
    } else if sigma < -tol {
        BifurcationType::ES
    } else if sigma > tol {
        BifurcationType::EU
    } else {
        BifurcationType::Degenerate
    };
    Ok(Classification {
        xi,
        hopf_kind: if xi == 1 { HopfKind::Hyperbolic } else { HopfKind::Elliptic },
        direction,
        sigma,
        sigma_tol: tol,
        kind,
        omega: c.omega,
        mu_validity_hint: MU_VALIDITY_FACTOR * (c.beta5 / c.gamma5).abs(),
    })
}

/// Leading-order geometry of the bifurcating orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedOrbit {
    pub mu: f64,
    /// Radius in frame coordinates.
    pub r0: f64,
    pub z0: f64,
    pub period: f64,
    /// Whether `mu` lies inside the heuristic trust region.
    pub within_hint: bool,
    /// Circle of radius `r0` in the rotation plane, in original coordinates.
    pub state_estimate: Vec<State>,
}

impl PredictedOrbit {
    /// Frame coordinates of the `k`-th circle point.
    pub fn frame_point(&self, k: usize) -> Vector3<f64> {
        let phi = 2.0 * PI * k as f64 / self.state_estimate.len() as f64;
        Vector3::new(self.r0 * phi.cos(), self.r0 * phi.sin(), self.z0)
    }
}

pub fn predict_orbit(c: &CylindricalCoefficients, mu: f64, frame: &StandardFrame) -> Result<PredictedOrbit> {
    if c.beta5 == 0.0 || c.gamma5 == 0.0 {
        return Err(Error::AssumptionViolation("beta5 and gamma5 must be nonzero".into()));
    }
    let expected = -sign(c.beta5 * c.gamma5);
    let r2 = -mu * c.gamma5 / c.beta5;
    if mu == 0.0 || !(r2 > 0.0) {
        return Err(Error::WrongDirection { expected, mu });
    }
    let r0 = r2.sqrt();
    let state_estimate = (0..CIRCLE_POINTS)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / CIRCLE_POINTS as f64;
            frame.from_frame(&Vector3::new(r0 * phi.cos(), r0 * phi.sin(), 0.0), mu)
        })
        .collect();
    Ok(PredictedOrbit {
        mu,
        r0,
        z0: 0.0,
        period: 2.0 * PI / c.omega,
        within_hint: mu.abs() < MU_VALIDITY_FACTOR * (c.beta5 / c.gamma5).abs(),
        state_estimate,
    })
}

/// Everything the pipeline learns about a model at one Hopf point.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub model: Model,
    pub hopf_point: State,
    pub report: AssumptionReport,
    pub frame: StandardFrame,
    /// Jet of the original field at the Hopf point.
    pub jet: JetTable,
    pub coefficients: CylindricalCoefficients,
    pub classification: Classification,
}

impl Analysis {
    pub fn predict(&self, mu: f64) -> Result<PredictedOrbit> {
        predict_orbit(&self.coefficients, mu, &self.frame)
    }
}

/// Locates the Hopf point from `seed`, checks the assumptions in the model's
/// frame, and classifies. Fails with `AssumptionViolation` naming the failed
/// assumptions.
pub fn analyze_model(model: &Model, seed: &State, source: JetSource) -> Result<Analysis> {
    let x_h = frame::locate_hopf_point(model, seed)?;
    analyze_at(model, &x_h, source)
}

/// As [`analyze_model`] with a known Hopf point.
pub fn analyze_at(model: &Model, x_h: &State, source: JetSource) -> Result<Analysis> {
    let a = frame::analyze(model, x_h, &model.frame_normalization(), source);
    let failed = a.report.verdicts.failed();
    if !failed.is_empty() {
        return Err(Error::AssumptionViolation(format!("{} failed\n{}", failed.join(", "), a.report.table())));
    }
    let (Some(fr), Some(sj)) = (a.frame, a.standard_jet) else {
        return Err(Error::AssumptionViolation("no standard frame".into()));
    };
    let coefficients = compute_coefficients(&sj)?;
    let classification = classify(&coefficients)?;
    let jet = model.jet(x_h, 0.0, source)?;
    Ok(Analysis {
        model: model.clone(),
        hopf_point: *x_h,
        report: a.report,
        frame: fr,
        jet,
        coefficients,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::build_standard_frame;
    use crate::models::builtin::{PredatorPrey, SyntheticNormalForm};
    use proptest::prelude::*;

    fn nf(a: f64, b: f64, c: f64, d: f64) -> Analysis {
        let m = SyntheticNormalForm { a, b, c, d, omega: 1.0 }.model().unwrap();
        analyze_model(&m, &[0.1, 0.1, 0.1], JetSource::Exact).unwrap()
    }

    fn pp() -> Analysis {
        let m = PredatorPrey { delta1: 1.0, delta2: 1.0, lambda: 0.3, alpha1: 0.2, alpha2: 0.6 }.model().unwrap();
        analyze_model(&m, &[0.15, 0.38, 0.31], JetSource::Exact).unwrap()
    }

    #[test]
    fn synthetic_types() {
        let c = nf(-1.0, 1.0, 1.0, 1.0).classification;
        assert_eq!((c.xi, c.direction, c.kind), (-1, -1, BifurcationType::ES));
        assert!((c.sigma + 1.0).abs() < 1e-12);
        assert_eq!(nf(1.0, 1.0, 1.0, 3.0).classification.kind, BifurcationType::H);
        assert_eq!(nf(-1.0, 1.0, 1.0, -1.0).classification.kind, BifurcationType::EU);
        assert_eq!(nf(-1.0, 1.0, 1.0, 0.0).classification.kind, BifurcationType::Degenerate);
    }

    #[test]
    fn predator_prey_is_es() {
        let a = pp();
        let c = a.classification;
        assert_eq!((c.xi, c.direction, c.kind), (-1, 1, BifurcationType::ES));
        assert!((c.sigma + 0.037125).abs() < 1e-12, "{}", c.sigma);
        let p = a.predict(0.01).unwrap();
        assert!((p.r0 - 0.15).abs() < 1e-12);
        assert!((p.period - 2.0 * PI / 0.3f64.sqrt()).abs() < 1e-10);
        assert_eq!(p.state_estimate.len(), CIRCLE_POINTS);
        assert!(matches!(a.predict(-0.01), Err(Error::WrongDirection { expected: 1, .. })));
    }

    #[test]
    fn predicted_radius_synthetic() {
        let p = nf(-1.0, 1.0, -1.0, 1.0).predict(0.04).unwrap();
        assert!((p.r0 - 0.2).abs() < 1e-12);
        assert!((p.period - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn degenerate_coefficients_rejected() {
        let m = SyntheticNormalForm { a: 0.0, b: 1.0, c: 1.0, d: 0.0, omega: 1.0 }.model().unwrap();
        let jet = m.jet(&[0.0; 3], 0.0, JetSource::Exact).unwrap();
        let f = build_standard_frame(&jet).unwrap();
        let c = compute_coefficients(&f.standard_jet(&jet).unwrap()).unwrap();
        assert!(matches!(classify(&c), Err(Error::AssumptionViolation(_))));
    }

    proptest! {
        #[test]
        fn frame_changes_preserve_classification(
            theta in 0.0..(2.0 * PI),
            plane in 0.2f64..5.0,
            line in 0.2f64..5.0,
        ) {
            for a in [pp(), nf(-1.0, 1.0, 1.0, 1.0), nf(0.5, -2.0, 1.0, 0.3)] {
                let g = a.frame.perturbed(&a.jet, theta, plane, line).unwrap();
                let c = compute_coefficients(&g.standard_jet(&a.jet).unwrap()).unwrap();
                let k = classify(&c).unwrap();
                let k0 = a.classification;
                prop_assert_eq!(k.xi, k0.xi);
                prop_assert_eq!(k.direction, k0.direction);
                prop_assert_eq!(k.kind, k0.kind);
                prop_assert_eq!(k.sigma > 0.0, k0.sigma > 0.0);
            }
        }

        #[test]
        fn time_rescaling_preserves_classification(s in 0.1f64..10.0, b in 0.2f64..3.0, d in -2.0f64..2.0) {
            let base = nf(-1.0, b, 1.0, d).classification;
            let m = SyntheticNormalForm { a: -s, b: s * b, c: s, d: s * d, omega: s }.model().unwrap();
            let k = analyze_model(&m, &[0.0; 3], JetSource::Exact).unwrap().classification;
            prop_assert_eq!((k.xi, k.direction, k.kind), (base.xi, base.direction, base.kind));
        }
    }
}
