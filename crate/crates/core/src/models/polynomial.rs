use serde::{Deserialize, Serialize};

use super::{AnalyticField, Scalar};
use crate::error::{Error, Result};

/// One monomial `coefficient * y1^e0 * y2^e1 * z^e2 * mu^e3` in one component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    /// Target component: `y1`, `y2` or `z` (also accepted: `x1`, `x2`, `x3`, `0`, `1`, `2`).
    pub component: String,
    /// Exponents of `y1, y2, z, mu`.
    pub exponents: [u32; 4],
    pub coefficient: f64,
}

/// Polynomial vector field given by a list of monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialField {
    terms: Vec<(usize, [u32; 4], f64)>,
}

pub fn component_index(name: &str) -> Result<usize> {
    match name {
        "y1" | "x1" | "0" => Ok(0),
        "y2" | "x2" | "1" => Ok(1),
        "z" | "x3" | "2" => Ok(2),
        other => Err(Error::Config(format!("unknown component `{other}`"))),
    }
}

impl PolynomialField {
    pub fn new(terms: &[Term]) -> Result<PolynomialField> {
        if terms.is_empty() {
            return Err(Error::Config("polynomial model needs at least one term".into()));
        }
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            if !t.coefficient.is_finite() {
                return Err(Error::Config(format!("non-finite coefficient in {t:?}")));
            }
            if t.exponents.iter().any(|&e| e > 16) {
                return Err(Error::Config(format!("exponent above 16 in {t:?}")));
            }
            out.push((component_index(&t.component)?, t.exponents, t.coefficient));
        }
        Ok(PolynomialField { terms: out })
    }
}

impl AnalyticField for PolynomialField {
    fn apply<S: Scalar>(&self, x: [S; 3], mu: S) -> [S; 3] {
        let mut out = [S::cst(0.0); 3];
        for &(comp, e, c) in &self.terms {
            let mono = x[0].powi(e[0]) * x[1].powi(e[1]) * x[2].powi(e[2]) * mu.powi(e[3]);
            out[comp] = out[comp] + S::cst(c) * mono;
        }
        out
    }
}
