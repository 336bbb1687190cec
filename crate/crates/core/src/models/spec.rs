//! Model description as a structured document.
//!
//! A model is either a built-in with parameters
//!
//! ```toml
//! builtin = "predator_prey"
//! params = { delta1 = 1.0, delta2 = 1.0, lambda = 0.3, alpha1 = 0.2, alpha2 = 0.6 }
//! ```
//!
//! or a polynomial field given as monomial terms over `(y1, y2, z, mu)`:
//!
//! ```toml
//! name = "rotating_drift"
//! terms = [
//!   { component = "y1", exponents = [0, 1, 0, 0], coefficient = -1.0 },
//!   { component = "y2", exponents = [1, 0, 0, 0], coefficient = 1.0 },
//! ]
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{builtin, Analytic, Model, PolynomialField, Term};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<Term>,
}

impl ModelSpec {
    pub fn builtin(name: &str, params: &[(&str, f64)]) -> ModelSpec {
        ModelSpec {
            builtin: Some(name.to_string()),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ..ModelSpec::default()
        }
    }

    pub fn build(&self) -> Result<Model> {
        match (&self.builtin, self.terms.is_empty()) {
            (Some(name), true) => builtin(name, &self.params),
            (None, false) => {
                if !self.params.is_empty() {
                    return Err(Error::Config("`params` only applies to built-in models".into()));
                }
                let field = PolynomialField::new(&self.terms)?;
                let name = self.name.clone().unwrap_or_else(|| "polynomial".to_string());
                Ok(Model::new(name, BTreeMap::new(), Arc::new(Analytic(field))))
            }
            (Some(_), false) => Err(Error::Config("give either `builtin` or `terms`, not both".into())),
            (None, true) => Err(Error::Config("model needs `builtin` or `terms`".into())),
        }
    }

    pub fn from_toml(text: &str) -> Result<ModelSpec> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtin() {
        let spec = ModelSpec::from_toml(
            r#"
            builtin = "synthetic_nf"
            params = { a = 1.0, b = 2.0, c = 3.0, d = 4.0 }
            "#,
        )
        .unwrap();
        let m = spec.build().unwrap();
        assert_eq!(m.name, "synthetic_nf");
        assert_eq!(m.param("omega"), Some(1.0));
    }

    #[test]
    fn parses_polynomial() {
        let spec = ModelSpec::from_toml(
            r#"
            name = "poly"
            terms = [
              { component = "y1", exponents = [0, 1, 0, 0], coefficient = -1.0 },
              { component = "y2", exponents = [1, 0, 0, 0], coefficient = 1.0 },
              { component = "z", exponents = [2, 0, 0, 0], coefficient = 1.0 },
            ]
            "#,
        )
        .unwrap();
        let m = spec.build().unwrap();
        assert!(m.has_exact_jet());
        assert_eq!(m.evaluate(&[1.0, 2.0, 0.0], 0.0).unwrap(), [-2.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_ambiguous_and_unknown_keys() {
        assert!(ModelSpec::from_toml("builtin = \"x\"\ncolor = 1").is_err());
        let both = ModelSpec {
            builtin: Some("synthetic_nf".into()),
            terms: vec![Term { component: "z".into(), exponents: [0; 4], coefficient: 1.0 }],
            ..Default::default()
        };
        assert!(both.build().is_err());
        assert!(ModelSpec::default().build().is_err());
    }
}
