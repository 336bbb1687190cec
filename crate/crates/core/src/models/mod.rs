//! Vector fields `F(X; mu)` on R^3 and their derivative jets.

pub mod builtin;
pub mod dual;
pub mod finite_diff;
pub mod jet;
pub mod polynomial;
pub mod spec;
pub mod taylor;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use builtin::builtin;
pub use dual::Dual;
pub use finite_diff::{finite_difference_jet, FdConfig};
pub use jet::JetTable;
pub use polynomial::{PolynomialField, Term};
pub use spec::ModelSpec;
pub use taylor::{Scalar, Taylor};

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::frame::FrameNormalization;

pub type State = [f64; 3];

/// Default admissible box: every coordinate strictly inside (-10, 10).
pub fn in_default_box(x: &State) -> bool {
    x.iter().all(|c| c.abs() < 10.0)
}

/// A smooth vector field with a scalar parameter.
///
/// Implement this directly for fields known only numerically; their jets are
/// then obtained by finite differences.
pub trait VectorField: Send + Sync {
    fn eval(&self, x: &State, mu: f64) -> State;

    /// Exact derivative jet, when the field can provide one.
    fn exact_jet(&self, _x: &State, _mu: f64) -> Option<JetTable> {
        None
    }

    fn provides_exact_jet(&self) -> bool {
        false
    }

    /// Exact Jacobian `D_x F`, when available.
    fn jacobian(&self, _x: &State, _mu: f64) -> Option<Matrix3<f64>> {
        None
    }

    fn admissible(&self, x: &State) -> bool {
        in_default_box(x)
    }
}

/// A field written once over any [`Scalar`], which gives exact jets for free.
pub trait AnalyticField: Send + Sync {
    fn apply<S: Scalar>(&self, x: [S; 3], mu: S) -> [S; 3];

    fn admissible(&self, x: &State) -> bool {
        in_default_box(x)
    }
}

/// Adapter turning an [`AnalyticField`] into a [`VectorField`] with exact jets.
pub struct Analytic<T>(pub T);

impl<T: AnalyticField> VectorField for Analytic<T> {
    fn eval(&self, x: &State, mu: f64) -> State {
        self.0.apply(*x, mu)
    }

    fn exact_jet(&self, x: &State, mu: f64) -> Option<JetTable> {
        let vars = [
            Taylor::variable(0, x[0]),
            Taylor::variable(1, x[1]),
            Taylor::variable(2, x[2]),
        ];
        let m = Taylor::variable(3, mu);
        let comps = self.0.apply(vars, m);
        if comps.iter().all(Taylor::is_finite) {
            Some(JetTable::from_taylor(*x, mu, &comps))
        } else {
            None
        }
    }

    fn provides_exact_jet(&self) -> bool {
        true
    }

    fn jacobian(&self, x: &State, mu: f64) -> Option<Matrix3<f64>> {
        let vars = [0, 1, 2].map(|i| Dual::variable(i, x[i]));
        let out = self.0.apply(vars, Dual::cst(mu));
        let m = Matrix3::from_fn(|r, c| out[r].d[c]);
        m.iter().all(|v| v.is_finite()).then_some(m)
    }

    fn admissible(&self, x: &State) -> bool {
        self.0.admissible(x)
    }
}

/// Which derivative route to use for a jet.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum JetSource {
    /// Exact jets when available, finite differences otherwise.
    #[default]
    Auto,
    Exact,
    FiniteDifference(FdConfig),
}

/// A named vector field with its parameter record.
#[derive(Clone)]
pub struct Model {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    field: Arc<dyn VectorField>,
    frame: FrameNormalization,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl Model {
    pub fn new(name: impl Into<String>, params: BTreeMap<String, f64>, field: Arc<dyn VectorField>) -> Model {
        Model { name: name.into(), params, field, frame: FrameNormalization::default() }
    }

    /// Sets the scale convention used when building this model's standard frame.
    pub fn with_frame_normalization(mut self, frame: FrameNormalization) -> Model {
        self.frame = frame;
        self
    }

    pub fn frame_normalization(&self) -> FrameNormalization {
        self.frame
    }

    pub fn from_field<F: VectorField + 'static>(name: impl Into<String>, field: F) -> Model {
        Model::new(name, BTreeMap::new(), Arc::new(field))
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// `F(x; mu)`, rejecting non-finite output.
    pub fn evaluate(&self, x: &State, mu: f64) -> Result<State> {
        let v = self.field.eval(x, mu);
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("{} at {:?}, mu = {}", self.name, x, mu)))
        }
    }

    /// `F(x; mu)` without the finiteness check, for inner loops that check themselves.
    #[inline]
    pub fn eval_raw(&self, x: &State, mu: f64) -> State {
        self.field.eval(x, mu)
    }

    pub fn admissible(&self, x: &State) -> bool {
        self.field.admissible(x)
    }

    pub fn has_exact_jet(&self) -> bool {
        self.field.provides_exact_jet()
    }

    pub fn exact_jet(&self, x: &State, mu: f64) -> Option<JetTable> {
        self.field.exact_jet(x, mu)
    }

    /// `D_x F(x; mu)`: exact when the field provides it, central differences otherwise.
    pub fn jacobian(&self, x: &State, mu: f64) -> Result<Matrix3<f64>> {
        if let Some(j) = self.field.jacobian(x, mu) {
            return Ok(j);
        }
        let mut m = Matrix3::zeros();
        for c in 0..3 {
            let h = 1e-6 * x[c].abs().max(1.0);
            let mut xp = *x;
            let mut xm = *x;
            xp[c] += h;
            xm[c] -= h;
            let fp = self.evaluate(&xp, mu)?;
            let fm = self.evaluate(&xm, mu)?;
            for r in 0..3 {
                m[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        Ok(m)
    }

    pub fn jet(&self, x: &State, mu: f64, source: JetSource) -> Result<JetTable> {
        match source {
            JetSource::Exact => self
                .field
                .exact_jet(x, mu)
                .ok_or_else(|| Error::MissingJetEntry(format!("{} has no exact jet at {:?}", self.name, x))),
            JetSource::FiniteDifference(cfg) => finite_difference_jet(self, x, mu, &cfg),
            JetSource::Auto => match self.field.exact_jet(x, mu) {
                Some(j) => Ok(j),
                None => finite_difference_jet(self, x, mu, &FdConfig::default()),
            },
        }
    }

    /// Model whose field is `B^-1 F(origin + B w; mu)`.
    pub fn conjugated(&self, origin: State, basis: Matrix3<f64>) -> Result<Model> {
        let inv = basis
            .try_inverse()
            .ok_or_else(|| Error::InvalidParams("singular conjugating basis".into()))?;
        let inner = self.clone();
        let name = format!("{}~conjugated", self.name);
        Ok(Model::new(
            name,
            self.params.clone(),
            Arc::new(Conjugated { inner, origin, basis, inv }),
        ))
    }
}

struct Conjugated {
    inner: Model,
    origin: State,
    basis: Matrix3<f64>,
    inv: Matrix3<f64>,
}

impl Conjugated {
    fn to_outer(&self, w: &State) -> State {
        let v = self.basis * nalgebra::Vector3::from(*w);
        [self.origin[0] + v[0], self.origin[1] + v[1], self.origin[2] + v[2]]
    }
}

impl VectorField for Conjugated {
    fn eval(&self, w: &State, mu: f64) -> State {
        let f = self.inner.eval_raw(&self.to_outer(w), mu);
        let g = self.inv * nalgebra::Vector3::from(f);
        [g[0], g[1], g[2]]
    }

    fn exact_jet(&self, w: &State, mu: f64) -> Option<JetTable> {
        let jet = self.inner.exact_jet(&self.to_outer(w), mu)?;
        let mut out = jet.transformed(&self.basis, &nalgebra::Vector3::zeros()).ok()?;
        out.point = *w;
        Some(out)
    }

    fn provides_exact_jet(&self) -> bool {
        self.inner.has_exact_jet()
    }

    fn jacobian(&self, w: &State, mu: f64) -> Option<Matrix3<f64>> {
        let j = self.inner.field.jacobian(&self.to_outer(w), mu)?;
        Some(self.inv * j * self.basis)
    }

    fn admissible(&self, w: &State) -> bool {
        self.inner.admissible(&self.to_outer(w))
    }
}
