//! Coefficients of the perturbed cylindrical form
//!
//! ```text
//! φ' = ω + μγ1(φ) + ωβ1 z + μγ2(φ) z/r + ...
//! r' = μγ3(φ) r + μγ4(φ) z + β2 r z + β3 r³ + β4 r z² + ...
//! z' = μγ5 + μγ6(φ) r + μγ7 z + β5 r² + β6 r² z + ...
//! ```
//!
//! evaluated from the derivative jet of a field in standard frame coordinates
//! at the origin and `mu = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::jet::{Y1, Y2, Z};
use crate::models::JetTable;

/// `c0 + c_cos1 cos φ + c_sin1 sin φ + c_cos2 cos 2φ + c_sin2 sin 2φ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HarmonicScalar {
    pub c0: f64,
    pub c_cos1: f64,
    pub c_sin1: f64,
    pub c_cos2: f64,
    pub c_sin2: f64,
}

impl HarmonicScalar {
    pub fn constant(c: f64) -> Self {
        HarmonicScalar { c0: c, ..Default::default() }
    }

    /// `a sin φ + b cos φ`.
    pub fn first(a_sin: f64, b_cos: f64) -> Self {
        HarmonicScalar { c_sin1: a_sin, c_cos1: b_cos, ..Default::default() }
    }

    /// `s sin²φ + m sin φ cos φ + c cos²φ + k`.
    pub fn quadratic(s: f64, m: f64, c: f64, k: f64) -> Self {
        HarmonicScalar {
            c0: 0.5 * (s + c) + k,
            c_cos2: 0.5 * (c - s),
            c_sin2: 0.5 * m,
            ..Default::default()
        }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.c0
            + self.c_cos1 * phi.cos()
            + self.c_sin1 * phi.sin()
            + self.c_cos2 * (2.0 * phi).cos()
            + self.c_sin2 * (2.0 * phi).sin()
    }

    pub fn mean(&self) -> f64 {
        self.c0
    }

    pub fn first_amplitude(&self) -> f64 {
        self.c_cos1.hypot(self.c_sin1)
    }

    pub fn second_amplitude(&self) -> f64 {
        self.c_cos2.hypot(self.c_sin2)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        [self.c0, self.c_cos1, self.c_sin1, self.c_cos2, self.c_sin2]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// All coefficients of the perturbed cylindrical form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylindricalCoefficients {
    pub omega: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
    pub beta5: f64,
    pub beta6: f64,
    pub gamma1: HarmonicScalar,
    pub gamma2: HarmonicScalar,
    pub gamma3: HarmonicScalar,
    pub gamma4: HarmonicScalar,
    pub gamma5: f64,
    pub gamma6: HarmonicScalar,
    pub gamma7: f64,
}

impl CylindricalCoefficients {
    /// Flat `(name, value)` listing; harmonic coefficients appear as `gamma1.c0` etc.
    pub fn flat(&self) -> Vec<(String, f64)> {
        let mut out = vec![
            ("omega".to_string(), self.omega),
            ("beta1".to_string(), self.beta1),
            ("beta2".to_string(), self.beta2),
            ("beta3".to_string(), self.beta3),
            ("beta4".to_string(), self.beta4),
            ("beta5".to_string(), self.beta5),
            ("beta6".to_string(), self.beta6),
            ("gamma5".to_string(), self.gamma5),
            ("gamma7".to_string(), self.gamma7),
        ];
        for (name, h) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("gamma4", self.gamma4),
            ("gamma6", self.gamma6),
        ] {
            for (part, v) in [
                ("c0", h.c0),
                ("c_cos1", h.c_cos1),
                ("c_sin1", h.c_sin1),
                ("c_cos2", h.c_cos2),
                ("c_sin2", h.c_sin2),
            ] {
                out.push((format!("{name}.{part}"), v));
            }
        }
        out
    }
}

// Shorthands over the standard-frame jet.
struct D<'a>(&'a JetTable);

impl D<'_> {
    fn f(&self, comp: usize, axes: &[usize]) -> f64 {
        self.0.d(comp, axes)
    }
    /// Laplacian in y of component `comp`.
    fn lap(&self, comp: usize) -> f64 {
        self.f(comp, &[Y1, Y1]) + self.f(comp, &[Y2, Y2])
    }
    fn mu(&self, comp: usize) -> f64 {
        self.0.dmu(comp)
    }
    fn mu_d(&self, comp: usize, axis: usize) -> f64 {
        self.0.dmu_d(comp, axis)
    }
}

/// Rotation frequency read off the standard-frame Jacobian.
pub fn omega(jet: &JetTable) -> f64 {
    let j = jet.jacobian();
    0.5 * (j[(1, 0)] - j[(0, 1)])
}

pub fn beta1(jet: &JetTable, omega: f64) -> f64 {
    let d = D(jet);
    (d.f(Y2, &[Y1, Z]) - d.f(Y1, &[Y2, Z])) / (2.0 * omega)
}

pub fn beta2(jet: &JetTable) -> f64 {
    let d = D(jet);
    0.5 * (d.f(Y1, &[Y1, Z]) + d.f(Y2, &[Y2, Z]))
}

pub fn beta3(jet: &JetTable, omega: f64) -> f64 {
    let d = D(jet);
    let t1 = (d.f(Y1, &[Y1, Y1, Y1]) + d.f(Y1, &[Y1, Y2, Y2]) + d.f(Y2, &[Y1, Y1, Y2]) + d.f(Y2, &[Y2, Y2, Y2]))
        / 16.0;
    let t2 = (d.f(Y1, &[Y1, Y2]) * d.lap(Y1) - d.f(Y2, &[Y1, Y2]) * d.lap(Y2)) / (16.0 * omega);
    let t3 = (d.f(Y1, &[Y2, Y2]) * d.f(Y2, &[Y2, Y2]) - d.f(Y1, &[Y1, Y1]) * d.f(Y2, &[Y1, Y1])) / (16.0 * omega);
    let t4 = (d.f(Y2, &[Y2, Z]) - d.f(Y1, &[Y1, Z])) * d.f(Z, &[Y1, Y2]) / (16.0 * omega);
    let t5 = (d.f(Y1, &[Y2, Z]) + d.f(Y2, &[Y1, Z])) * (d.f(Z, &[Y1, Y1]) - d.f(Z, &[Y2, Y2])) / (32.0 * omega);
    t1 + t2 + t3 + t4 + t5
}

pub fn beta4(jet: &JetTable) -> f64 {
    let d = D(jet);
    0.25 * (d.f(Y1, &[Y1, Z, Z]) + d.f(Y2, &[Y2, Z, Z]))
}

pub fn beta5(jet: &JetTable) -> f64 {
    0.25 * D(jet).lap(Z)
}

pub fn beta6(jet: &JetTable, omega: f64) -> f64 {
    let d = D(jet);
    let t1 = 0.25 * (d.f(Z, &[Y1, Y1, Z]) + d.f(Z, &[Y2, Y2, Z]));
    let t2 = (d.f(Z, &[Y2, Z]) * d.lap(Y1) - d.f(Z, &[Y1, Z]) * d.lap(Y2)) / (4.0 * omega);
    let t3 = (d.f(Y1, &[Y1, Z]) - d.f(Y2, &[Y2, Z])) * d.f(Z, &[Y1, Y2]) / (4.0 * omega);
    let t4 = (d.f(Y1, &[Y2, Z]) + d.f(Y2, &[Y1, Z])) * (d.f(Z, &[Y2, Y2]) - d.f(Z, &[Y1, Y1])) / (8.0 * omega);
    t1 + t2 + t3 + t4
}

pub fn gamma1(jet: &JetTable, omega: f64) -> HarmonicScalar {
    let d = D(jet);
    let g5 = d.mu(Z);
    let (a11, a12, a21, a22) = (d.f(Y1, &[Y1, Z]), d.f(Y1, &[Y2, Z]), d.f(Y2, &[Y1, Z]), d.f(Y2, &[Y2, Z]));
    let sin2 = -d.mu_d(Y1, Y2);
    let sincos = d.mu_d(Y2, Y2) - d.mu_d(Y1, Y1) - (a12 + a21) * g5 / (2.0 * omega);
    let cos2 = d.mu_d(Y2, Y1) - (a11 - a22) * g5 / (2.0 * omega);
    let k = -(PI * a12 - PI * a21 - 0.5 * a11 + 0.5 * a22) * g5 / (2.0 * omega);
    HarmonicScalar::quadratic(sin2, sincos, cos2, k)
}

pub fn gamma2(jet: &JetTable) -> HarmonicScalar {
    let d = D(jet);
    HarmonicScalar::first(-d.mu_d(Y1, Z), d.mu_d(Y2, Z))
}

pub fn gamma3(jet: &JetTable, omega: f64) -> HarmonicScalar {
    let d = D(jet);
    let g5 = d.mu(Z);
    let (a11, a12, a21, a22) = (d.f(Y1, &[Y1, Z]), d.f(Y1, &[Y2, Z]), d.f(Y2, &[Y1, Z]), d.f(Y2, &[Y2, Z]));
    let sin2 = d.mu_d(Y2, Y2);
    let sincos = d.mu_d(Y1, Y2) + d.mu_d(Y2, Y1) - (a11 - a22) * g5 / (2.0 * omega);
    let cos2 = d.mu_d(Y1, Y1) + (a12 + a21) * g5 / (2.0 * omega);
    let k = (PI * a11 + PI * a22 - 0.5 * a12 - 0.5 * a21) * g5 / (2.0 * omega);
    HarmonicScalar::quadratic(sin2, sincos, cos2, k)
}

pub fn gamma4(jet: &JetTable) -> HarmonicScalar {
    let d = D(jet);
    HarmonicScalar::first(d.mu_d(Y2, Z), d.mu_d(Y1, Z))
}

pub fn gamma5(jet: &JetTable) -> f64 {
    D(jet).mu(Z)
}

pub fn gamma6(jet: &JetTable, omega: f64) -> HarmonicScalar {
    let d = D(jet);
    let g5 = d.mu(Z);
    HarmonicScalar::first(
        d.mu_d(Z, Y2) - d.f(Z, &[Y1, Z]) * g5 / omega,
        d.mu_d(Z, Y1) + d.f(Z, &[Y2, Z]) * g5 / omega,
    )
}

pub fn gamma7(jet: &JetTable) -> f64 {
    D(jet).mu_d(Z, Z)
}

/// All coefficients from a complete standard-frame jet at the origin.
pub fn compute_coefficients(jet: &JetTable) -> Result<CylindricalCoefficients> {
    jet.require_complete()?;
    let w = omega(jet);
    Ok(CylindricalCoefficients {
        omega: w,
        beta1: beta1(jet, w),
        beta2: beta2(jet),
        beta3: beta3(jet, w),
        beta4: beta4(jet),
        beta5: beta5(jet),
        beta6: beta6(jet, w),
        gamma1: gamma1(jet, w),
        gamma2: gamma2(jet),
        gamma3: gamma3(jet, w),
        gamma4: gamma4(jet),
        gamma5: gamma5(jet),
        gamma6: gamma6(jet, w),
        gamma7: gamma7(jet),
    })
}

/// Any subset of independently known coefficient values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialCoefficients {
    pub omega: Option<f64>,
    pub beta2: Option<f64>,
    pub beta3: Option<f64>,
    pub beta5: Option<f64>,
    pub beta6: Option<f64>,
    pub gamma5: Option<f64>,
    pub gamma7: Option<f64>,
}

impl PartialCoefficients {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        [
            ("omega", self.omega),
            ("beta2", self.beta2),
            ("beta3", self.beta3),
            ("beta5", self.beta5),
            ("beta6", self.beta6),
            ("gamma5", self.gamma5),
            ("gamma7", self.gamma7),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| (n, v)))
        .collect()
    }

    /// The same record without `names`.
    pub fn without(mut self, names: &[&str]) -> Self {
        for n in names {
            match *n {
                "omega" => self.omega = None,
                "beta2" => self.beta2 = None,
                "beta3" => self.beta3 = None,
                "beta5" => self.beta5 = None,
                "beta6" => self.beta6 = None,
                "gamma5" => self.gamma5 = None,
                "gamma7" => self.gamma7 = None,
                _ => {}
            }
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub entries: Vec<Discrepancy>,
    pub max_rel_error: f64,
}

/// Denominator floor for relative errors, as a fraction of the largest
/// reference magnitude in the record. Keeps entries that vanish at a sample
/// (e.g. `beta6` when both predators share a death rate) from dividing by zero.
pub const RELATIVE_FLOOR: f64 = 1e-3;

/// Per-coefficient relative error `|computed - reference| / max(|reference|, floor)`.
pub fn closed_form_check(coeffs: &CylindricalCoefficients, reference: &PartialCoefficients) -> DiscrepancyReport {
    let refs = reference.entries();
    let scale = refs.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    let floor = (RELATIVE_FLOOR * scale).max(f64::MIN_POSITIVE);
    let mut report = DiscrepancyReport::default();
    for (name, r) in refs {
        let computed = match name {
            "omega" => coeffs.omega,
            "beta2" => coeffs.beta2,
            "beta3" => coeffs.beta3,
            "beta5" => coeffs.beta5,
            "beta6" => coeffs.beta6,
            "gamma5" => coeffs.gamma5,
            "gamma7" => coeffs.gamma7,
            _ => unreachable!(),
        };
        let rel_error = (computed - r).abs() / r.abs().max(floor);
        report.max_rel_error = report.max_rel_error.max(rel_error);
        report.entries.push(Discrepancy { name: name.to_string(), computed, reference: r, rel_error });
    }
    report
}
