use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::taylor::Taylor;
use crate::error::{Error, Result};

pub const Y1: usize = 0;
pub const Y2: usize = 1;
pub const Z: usize = 2;

/// Number of state multi-indices with order at most 3 in three variables.
pub const NSTATE: usize = 20;

const STATE_EXPS: [[u8; 3]; NSTATE] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

pub fn state_index(exps: [u8; 3]) -> Option<usize> {
    STATE_EXPS.iter().position(|e| *e == exps)
}

pub fn state_exponents(k: usize) -> [u8; 3] {
    STATE_EXPS[k]
}

fn exps_of(axes: &[usize]) -> [u8; 3] {
    let mut e = [0u8; 3];
    for &a in axes {
        e[a] += 1;
    }
    e
}

/// Finite-difference step used for one derivative order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub order: usize,
    pub steps: [f64; 3],
    pub mu_step: f64,
}

/// Partial derivatives of a vector field at a point.
///
/// `state[i][k]` is the partial derivative of component `i` for the `k`-th
/// state multi-index (see [`state_exponents`]); entries are stored once per
/// multi-index, so mixed partials are symmetric by construction. The parameter
/// block holds the first derivative in `mu` and its mixed partials with each
/// state coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetTable {
    pub point: [f64; 3],
    pub mu: f64,
    pub state: [[f64; NSTATE]; 3],
    /// Highest state order actually populated.
    pub max_order: usize,
    pub d_mu: Option<[f64; 3]>,
    /// `d_mu_state[i][j]` = d/dmu d/dx_j F_i.
    pub d_mu_state: Option<[[f64; 3]; 3]>,
    pub step_report: Vec<StepReport>,
    /// Largest disagreement between derivative orderings of the same multi-index.
    pub symmetry_defect: f64,
}

impl JetTable {
    /// Jet from the Taylor expansion of the three field components.
    pub fn from_taylor(point: [f64; 3], mu: f64, comps: &[Taylor; 3]) -> JetTable {
        let mut state = [[0.0; NSTATE]; 3];
        let mut d_mu = [0.0; 3];
        let mut d_mu_state = [[0.0; 3]; 3];
        for i in 0..3 {
            for (k, e) in STATE_EXPS.iter().enumerate() {
                state[i][k] = comps[i].derivative([e[0], e[1], e[2], 0]);
            }
            d_mu[i] = comps[i].derivative([0, 0, 0, 1]);
            for j in 0..3 {
                let mut e = [0u8, 0, 0, 1];
                e[j] = 1;
                d_mu_state[i][j] = comps[i].derivative(e);
            }
        }
        JetTable {
            point,
            mu,
            state,
            max_order: 3,
            d_mu: Some(d_mu),
            d_mu_state: Some(d_mu_state),
            step_report: Vec::new(),
            symmetry_defect: 0.0,
        }
    }

    /// Partial derivative of component `comp` along the listed axes (any order).
    pub fn d(&self, comp: usize, axes: &[usize]) -> f64 {
        if axes.len() > self.max_order {
            return 0.0;
        }
        self.state[comp][state_index(exps_of(axes)).expect("order at most 3")]
    }

    pub fn dmu(&self, comp: usize) -> f64 {
        self.d_mu.map(|v| v[comp]).unwrap_or(0.0)
    }

    pub fn dmu_d(&self, comp: usize, axis: usize) -> f64 {
        self.d_mu_state.map(|m| m[comp][axis]).unwrap_or(0.0)
    }

    pub fn value(&self) -> Vector3<f64> {
        Vector3::new(self.state[0][0], self.state[1][0], self.state[2][0])
    }

    pub fn jacobian(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.d(i, &[j]))
    }

    /// Hessian of component `comp`.
    pub fn hessian(&self, comp: usize) -> Matrix3<f64> {
        Matrix3::from_fn(|a, b| self.d(comp, &[a, b]))
    }

    /// Fails unless every entry the cylindrical-form coefficients need is present.
    pub fn require_complete(&self) -> Result<()> {
        if self.max_order < 3 {
            return Err(Error::MissingJetEntry(format!(
                "state derivatives of order 3 (jet has order {})",
                self.max_order
            )));
        }
        if self.d_mu.is_none() {
            return Err(Error::MissingJetEntry("d/dmu F".into()));
        }
        if self.d_mu_state.is_none() {
            return Err(Error::MissingJetEntry("d/dmu d/dx F".into()));
        }
        Ok(())
    }

    /// Jet of `G(w; mu) = B^-1 F(point + B (w - mu * shift); mu)` at `w = 0`.
    ///
    /// `basis` holds the new coordinate directions as columns. The result is
    /// expressed at the origin of the new coordinates.
    pub fn transformed(&self, basis: &Matrix3<f64>, shift: &Vector3<f64>) -> Result<JetTable> {
        let binv = basis
            .try_inverse()
            .ok_or_else(|| Error::DefectiveSpectrum("singular basis".into()))?;
        let b = basis;
        let mut out = self.clone();
        out.point = [0.0; 3];
        out.step_report = self.step_report.clone();

        // state derivatives: contract every lower index with B and the upper with B^-1
        for (k, e) in STATE_EXPS.iter().enumerate() {
            let axes: Vec<usize> = (0..3)
                .flat_map(|a| std::iter::repeat_n(a, e[a] as usize))
                .collect();
            if axes.len() > self.max_order {
                for i in 0..3 {
                    out.state[i][k] = 0.0;
                }
                continue;
            }
            let mut raw = [0.0; 3];
            let n = axes.len();
            let total = 3usize.pow(n as u32);
            for idx in 0..total {
                let mut rem = idx;
                let mut orig = [0usize; 3];
                let mut weight = 1.0;
                for (slot, &a) in axes.iter().enumerate() {
                    let q = rem % 3;
                    rem /= 3;
                    orig[slot] = q;
                    weight *= b[(q, a)];
                }
                if weight == 0.0 {
                    continue;
                }
                for (p, r) in raw.iter_mut().enumerate() {
                    *r += weight * self.d(p, &orig[..n]);
                }
            }
            for i in 0..3 {
                out.state[i][k] = (0..3).map(|p| binv[(i, p)] * raw[p]).sum();
            }
        }

        let drift = b * shift;
        let jac = self.jacobian();
        if let Some(dm) = self.d_mu {
            let v = Vector3::from(dm) - jac * drift;
            let w = binv * v;
            out.d_mu = Some([w[0], w[1], w[2]]);
        }
        if let Some(dms) = self.d_mu_state {
            let dms = Matrix3::from_fn(|i, j| dms[i][j]);
            let mut m = dms * b;
            for p in 0..3 {
                let h = self.hessian(p);
                let corr = (h * drift).transpose() * b;
                for a in 0..3 {
                    m[(p, a)] -= corr[a];
                }
            }
            let m = binv * m;
            out.d_mu_state = Some([
                [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
                [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
                [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
            ]);
        }
        Ok(out)
    }

    /// Largest relative deviation between two jets over orders `1..=max_order`,
    /// using `max(|reference|, floor)` as the scale of each entry.
    pub fn max_rel_diff(&self, reference: &JetTable, order: usize, floor: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for (k, e) in STATE_EXPS.iter().enumerate() {
                let o = (e[0] + e[1] + e[2]) as usize;
                if o != order {
                    continue;
                }
                let a = self.state[i][k];
                let r = reference.state[i][k];
                worst = worst.max((a - r).abs() / r.abs().max(floor));
            }
        }
        worst
    }
}
