//! Built-in model catalog.
//!
//! | name              | parameters                                         |
//! |-------------------|----------------------------------------------------|
//! | `predator_prey`   | `delta1 delta2 lambda alpha1 alpha2`               |
//! | `synthetic_nf`    | `a b c d omega`                                    |
//! | `toy_cylindrical` | `omega beta2 beta3 beta4 beta5 beta6 gamma3 gamma5 gamma7` |
//! | `classical_hopf`  | `sign omega`                                       |

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Analytic, AnalyticField, Model, Scalar, State};
use crate::error::{Error, Result};

pub const CATALOG: [&str; 4] = ["predator_prey", "synthetic_nf", "toy_cylindrical", "classical_hopf"];

/// Two predators competing for one prey with Holling type II response; the
/// parameter shifts the break-even concentration of the second predator to
/// `lambda + mu`. Coordinates are `(x1, x2, s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredatorPrey {
    pub delta1: f64,
    pub delta2: f64,
    pub lambda: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl AnalyticField for PredatorPrey {
    fn apply<S: Scalar>(&self, x: [S; 3], mu: S) -> [S; 3] {
        let c = S::cst;
        let [x1, x2, s] = x;
        let r1 = s / (s + c(self.alpha1));
        let r2 = s / (s + c(self.alpha2));
        [
            c(self.delta1) * (s - c(self.lambda)) / (s + c(self.alpha1)) * x1,
            c(self.delta2) * (s - (c(self.lambda) + mu)) / (s + c(self.alpha2)) * x2,
            s * (c(1.0) - s) - r1 * x1 - r2 * x2,
        ]
    }

    fn admissible(&self, x: &State) -> bool {
        x.iter().all(|&c| c > 0.0 && c < 10.0)
    }
}

/// Normal-form field with a line of equilibria on the `z` axis:
/// rotation at `omega`, `y' += a y z`, `z' = b |y|^2 + c mu + d mu z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticNormalForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub omega: f64,
}

impl AnalyticField for SyntheticNormalForm {
    fn apply<S: Scalar>(&self, x: [S; 3], mu: S) -> [S; 3] {
        let k = S::cst;
        let [y1, y2, z] = x;
        [
            -k(self.omega) * y2 + k(self.a) * y1 * z,
            k(self.omega) * y1 + k(self.a) * y2 * z,
            k(self.b) * (y1 * y1 + y2 * y2) + k(self.c) * mu + k(self.d) * mu * z,
        ]
    }
}

/// Cartesian form of the truncated cylindrical normal form with constant
/// angular speed and no angle-dependent parameter terms:
///
/// ```text
/// r' = beta2 r z + mu gamma3 r + beta3 r^3 + beta4 r z^2
/// z' = mu gamma5 + beta5 r^2 + mu gamma7 z + beta6 r^2 z
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToyCylindrical {
    pub omega: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
    pub beta5: f64,
    pub beta6: f64,
    pub gamma3: f64,
    pub gamma5: f64,
    pub gamma7: f64,
}

impl AnalyticField for ToyCylindrical {
    fn apply<S: Scalar>(&self, x: [S; 3], mu: S) -> [S; 3] {
        let k = S::cst;
        let [y1, y2, z] = x;
        let r2 = y1 * y1 + y2 * y2;
        let radial = k(self.beta2) * z + mu * k(self.gamma3) + k(self.beta3) * r2 + k(self.beta4) * z * z;
        [
            -k(self.omega) * y2 + radial * y1,
            k(self.omega) * y1 + radial * y2,
            mu * k(self.gamma5) + k(self.beta5) * r2 + mu * k(self.gamma7) * z + k(self.beta6) * r2 * z,
        ]
    }
}

/// Classical Hopf unfolding where `z` plays the role of the parameter:
/// `r' = r (z + sign r^2)`, `z' = mu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalHopf {
    pub sign: f64,
    pub omega: f64,
}

impl AnalyticField for ClassicalHopf {
    fn apply<S: Scalar>(&self, x: [S; 3], mu: S) -> [S; 3] {
        let k = S::cst;
        let [y1, y2, z] = x;
        let radial = z + k(self.sign) * (y1 * y1 + y2 * y2);
        [-k(self.omega) * y2 + radial * y1, k(self.omega) * y1 + radial * y2, mu]
    }
}

fn get(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    let v = params
        .get(key)
        .copied()
        .ok_or_else(|| Error::InvalidParams(format!("missing parameter `{key}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParams(format!("parameter `{key}` is not finite")))
    }
}

fn get_or(params: &BTreeMap<String, f64>, key: &str, default: f64) -> Result<f64> {
    if params.contains_key(key) {
        get(params, key)
    } else {
        Ok(default)
    }
}

fn reject_unknown(params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidParams(format!("unknown parameter `{k}`"))),
        None => Ok(()),
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParams(format!("`{name}` must be positive, got {v}")))
    }
}

impl PredatorPrey {
    pub fn model(self) -> Result<Model> {
        positive("delta1", self.delta1)?;
        positive("delta2", self.delta2)?;
        positive("lambda", self.lambda)?;
        positive("alpha1", self.alpha1)?;
        positive("alpha2", self.alpha2)?;
        let params = BTreeMap::from([
            ("delta1".to_string(), self.delta1),
            ("delta2".to_string(), self.delta2),
            ("lambda".to_string(), self.lambda),
            ("alpha1".to_string(), self.alpha1),
            ("alpha2".to_string(), self.alpha2),
        ]);
        Ok(Model::new("predator_prey", params, Arc::new(Analytic(self))).with_frame_normalization(crate::eco::FRAME))
    }
}

impl SyntheticNormalForm {
    pub fn model(self) -> Result<Model> {
        positive("omega", self.omega)?;
        let params = BTreeMap::from([
            ("a".to_string(), self.a),
            ("b".to_string(), self.b),
            ("c".to_string(), self.c),
            ("d".to_string(), self.d),
            ("omega".to_string(), self.omega),
        ]);
        Ok(Model::new("synthetic_nf", params, Arc::new(Analytic(self))))
    }
}

impl ToyCylindrical {
    pub fn model(self) -> Result<Model> {
        positive("omega", self.omega)?;
        let params = BTreeMap::from([
            ("omega".to_string(), self.omega),
            ("beta2".to_string(), self.beta2),
            ("beta3".to_string(), self.beta3),
            ("beta4".to_string(), self.beta4),
            ("beta5".to_string(), self.beta5),
            ("beta6".to_string(), self.beta6),
            ("gamma3".to_string(), self.gamma3),
            ("gamma5".to_string(), self.gamma5),
            ("gamma7".to_string(), self.gamma7),
        ]);
        Ok(Model::new("toy_cylindrical", params, Arc::new(Analytic(self))))
    }
}

impl ClassicalHopf {
    pub fn model(self) -> Result<Model> {
        positive("omega", self.omega)?;
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(Error::InvalidParams(format!("`sign` must be +1 or -1, got {}", self.sign)));
        }
        let params = BTreeMap::from([("sign".to_string(), self.sign), ("omega".to_string(), self.omega)]);
        Ok(Model::new("classical_hopf", params, Arc::new(Analytic(self))))
    }
}

/// Looks up a built-in model by name.
pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<Model> {
    match name {
        "predator_prey" => {
            reject_unknown(params, &["delta1", "delta2", "lambda", "alpha1", "alpha2"])?;
            PredatorPrey {
                delta1: get(params, "delta1")?,
                delta2: get(params, "delta2")?,
                lambda: get(params, "lambda")?,
                alpha1: get(params, "alpha1")?,
                alpha2: get(params, "alpha2")?,
            }
            .model()
        }
        "synthetic_nf" => {
            reject_unknown(params, &["a", "b", "c", "d", "omega"])?;
            SyntheticNormalForm {
                a: get(params, "a")?,
                b: get(params, "b")?,
                c: get(params, "c")?,
                d: get(params, "d")?,
                omega: get_or(params, "omega", 1.0)?,
            }
            .model()
        }
        "toy_cylindrical" => {
            let keys = [
                "omega", "beta2", "beta3", "beta4", "beta5", "beta6", "gamma3", "gamma5", "gamma7",
            ];
            reject_unknown(params, &keys)?;
            ToyCylindrical {
                omega: get_or(params, "omega", 1.0)?,
                beta2: get(params, "beta2")?,
                beta3: get_or(params, "beta3", 0.0)?,
                beta4: get_or(params, "beta4", 0.0)?,
                beta5: get(params, "beta5")?,
                beta6: get_or(params, "beta6", 0.0)?,
                gamma3: get_or(params, "gamma3", 0.0)?,
                gamma5: get(params, "gamma5")?,
                gamma7: get_or(params, "gamma7", 0.0)?,
            }
            .model()
        }
        "classical_hopf" => {
            reject_unknown(params, &["sign", "omega"])?;
            ClassicalHopf {
                sign: get_or(params, "sign", 1.0)?,
                omega: get_or(params, "omega", 1.0)?,
            }
            .model()
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}
