//! Central-difference derivative jets with one level of Richardson extrapolation.

use serde::{Deserialize, Serialize};

use super::jet::{state_exponents, JetTable, StepReport, NSTATE};
use super::{Model, State};
use crate::error::{Error, Result};

/// Step configuration for [`finite_difference_jet`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Base step for orders 1 and 2, scaled by `max(1, |coordinate|)`.
    pub low_step: f64,
    /// Base step for order 3, scaled by `max(1, |coordinate|)`.
    pub high_step: f64,
    /// Step in the parameter.
    pub mu_step: f64,
    /// Declared accuracy of order-3 entries; the mixed-partial defect limit is 100x this.
    pub tolerance: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            low_step: 1e-4,
            high_step: 1e-3,
            mu_step: 1e-4,
            tolerance: 1e-4,
        }
    }
}

// (offset in units of h, weight) for central stencils of orders 0..=3
fn weights(order: u8) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => unreachable!("order above 3"),
    }
}

struct Probe<'a> {
    model: &'a Model,
    point: State,
    mu: f64,
}

impl Probe<'_> {
    fn eval(&self, dx: [f64; 3], dmu: f64) -> Result<[f64; 3]> {
        let x = [
            self.point[0] + dx[0],
            self.point[1] + dx[1],
            self.point[2] + dx[2],
        ];
        self.model.evaluate(&x, self.mu + dmu)
    }

    /// Tensor-product central stencil for the multi-index `counts` (state, mu).
    fn stencil(&self, counts: [u8; 4], steps: [f64; 4], center: [f64; 4]) -> Result<[f64; 3]> {
        let mut acc = [0.0; 3];
        let w: Vec<&[(i32, f64)]> = counts.iter().map(|&c| weights(c)).collect();
        for &(o0, w0) in w[0] {
            for &(o1, w1) in w[1] {
                for &(o2, w2) in w[2] {
                    for &(o3, w3) in w[3] {
                        let weight = w0 * w1 * w2 * w3;
                        let v = self.eval(
                            [
                                center[0] + o0 as f64 * steps[0],
                                center[1] + o1 as f64 * steps[1],
                                center[2] + o2 as f64 * steps[2],
                            ],
                            center[3] + o3 as f64 * steps[3],
                        )?;
                        for i in 0..3 {
                            acc[i] += weight * v[i];
                        }
                    }
                }
            }
        }
        let scale: f64 = (0..4).map(|v| steps[v].powi(counts[v] as i32)).product();
        Ok(acc.map(|a| a / scale))
    }

    /// Richardson-extrapolated stencil: (4 D(h/2) - D(h)) / 3.
    fn richardson(&self, counts: [u8; 4], steps: [f64; 4], center: [f64; 4]) -> Result<[f64; 3]> {
        let coarse = self.stencil(counts, steps, center)?;
        let fine = self.stencil(counts, steps.map(|h| 0.5 * h), center)?;
        Ok([0, 1, 2].map(|i| (4.0 * fine[i] - coarse[i]) / 3.0))
    }
}

/// Derivative jet of `model` at `(point, mu)` by central differences.
pub fn finite_difference_jet(model: &Model, point: &State, mu: f64, config: &FdConfig) -> Result<JetTable> {
    if !(config.low_step > 0.0 && config.high_step > 0.0 && config.mu_step > 0.0) {
        return Err(Error::InvalidParams("finite-difference steps must be positive".into()));
    }
    let probe = Probe { model, point: *point, mu };
    let scale = point.map(|c| c.abs().max(1.0));
    let low = [0, 1, 2].map(|a| config.low_step * scale[a]);
    let high = [0, 1, 2].map(|a| config.high_step * scale[a]);
    let mu_step = config.mu_step * mu.abs().max(1.0);

    let mut state = [[0.0; NSTATE]; 3];
    let mut defect: f64 = 0.0;
    for k in 0..NSTATE {
        let e = state_exponents(k);
        let order = (e[0] + e[1] + e[2]) as usize;
        let h = if order == 3 { high } else { low };
        let counts = [e[0], e[1], e[2], 0];
        let steps = [h[0], h[1], h[2], mu_step];
        let v = probe.richardson(counts, steps, [0.0; 4])?;
        for i in 0..3 {
            state[i][k] = v[i];
        }
        if order == 3 {
            defect = defect.max(ordering_defect(&probe, e, h, &v)?);
        }
    }

    let d_mu = probe.richardson([0, 0, 0, 1], [low[0], low[1], low[2], mu_step], [0.0; 4])?;
    let mut d_mu_state = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut counts = [0u8, 0, 0, 1];
        counts[j] = 1;
        let v = probe.richardson(counts, [low[0], low[1], low[2], mu_step], [0.0; 4])?;
        for i in 0..3 {
            d_mu_state[i][j] = v[i];
        }
    }

    let limit = 100.0 * config.tolerance;
    if defect > limit {
        return Err(Error::SymmetryDefect { defect, limit });
    }

    Ok(JetTable {
        point: *point,
        mu,
        state,
        max_order: 3,
        d_mu: Some(d_mu),
        d_mu_state: Some(d_mu_state),
        step_report: vec![
            StepReport { order: 1, steps: low, mu_step },
            StepReport { order: 2, steps: low, mu_step },
            StepReport { order: 3, steps: high, mu_step },
        ],
        symmetry_defect: defect,
    })
}

/// Recomputes a mixed third partial by differencing a second partial along
/// each distinct axis in turn, and returns the largest relative disagreement
/// with the tensor-stencil value.
fn ordering_defect(probe: &Probe, e: [u8; 3], h: [f64; 3], primary: &[f64; 3]) -> Result<f64> {
    let distinct = e.iter().filter(|&&c| c > 0).count();
    if distinct < 2 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for outer in 0..3 {
        if e[outer] == 0 {
            continue;
        }
        let mut inner = e;
        inner[outer] -= 1;
        let ho = 1.5 * h[outer];
        let eval_inner = |sign: f64| -> Result<[f64; 3]> {
            let mut center = [0.0; 4];
            center[outer] = sign * ho;
            probe.richardson([inner[0], inner[1], inner[2], 0], [h[0], h[1], h[2], 1.0], center)
        };
        let coarse = {
            let p = eval_inner(1.0)?;
            let m = eval_inner(-1.0)?;
            [0, 1, 2].map(|i| (p[i] - m[i]) / (2.0 * ho))
        };
        let fine = {
            let half = 0.5 * ho;
            let mut cp = [0.0; 4];
            cp[outer] = half;
            let mut cm = [0.0; 4];
            cm[outer] = -half;
            let p = probe.richardson([inner[0], inner[1], inner[2], 0], [h[0], h[1], h[2], 1.0], cp)?;
            let m = probe.richardson([inner[0], inner[1], inner[2], 0], [h[0], h[1], h[2], 1.0], cm)?;
            [0, 1, 2].map(|i| (p[i] - m[i]) / ho)
        };
        for i in 0..3 {
            let alt = (4.0 * fine[i] - coarse[i]) / 3.0;
            worst = worst.max((alt - primary[i]).abs() / primary[i].abs().max(1.0));
        }
    }
    Ok(worst)
}
