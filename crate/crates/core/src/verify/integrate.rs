//! Dormand–Prince 5(4) with step-size control and a fourth-order continuous extension.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Model, State};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Smallest and largest accepted tolerance.
pub const TOL_RANGE: (f64, f64) = (1e-13, 1e-6);
/// Tolerance for periodic-orbit solves.
pub const ORBIT_TOL: f64 = 1e-11;
/// Tolerance for sweeps and comparisons.
pub const SWEEP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative and absolute local error bound per step.
    pub tol: f64,
    pub max_steps: usize,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions { tol, max_steps: 1_000_000, h0: None }
    }
}

/// One accepted step with its continuous-extension coefficients.
#[derive(Clone, Debug)]
struct DenseStep {
    t: f64,
    h: f64,
    // 5 blocks of length n
    rcont: Vec<f64>,
}

/// Solution of an initial value problem with dense output.
#[derive(Clone, Debug)]
pub struct Solution {
    pub dim: usize,
    /// Accepted step end points, starting with the initial time.
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    steps: Vec<DenseStep>,
    pub rejected: usize,
    /// True if integration ended early at the stop callback.
    pub stopped: bool,
}

impl Solution {
    pub fn t_end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    pub fn y_end(&self) -> &[f64] {
        self.y.last().unwrap()
    }

    /// Continuous extension at `t` within the integrated interval.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let n = self.dim;
        if self.steps.is_empty() {
            return self.y[0].clone();
        }
        let forward = self.steps[0].h > 0.0;
        // index of the step containing t
        let idx = self
            .steps
            .partition_point(|s| if forward { s.t + s.h < t } else { s.t + s.h > t })
            .min(self.steps.len() - 1);
        let s = &self.steps[idx];
        let theta = (t - s.t) / s.h;
        let theta1 = 1.0 - theta;
        let r = &s.rcont;
        (0..n)
            .map(|i| {
                r[i] + theta * (r[n + i] + theta1 * (r[2 * n + i] + theta * (r[3 * n + i] + theta1 * r[4 * n + i])))
            })
            .collect()
    }

    /// Uniform samples `(t, y)` at `count` points from start to end, inclusive.
    pub fn sample(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        let t0 = self.t[0];
        let t1 = self.t_end();
        (0..count)
            .map(|k| {
                let t = if count == 1 { t0 } else { t0 + (t1 - t0) * k as f64 / (count - 1) as f64 };
                (t, self.eval(t))
            })
            .collect()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&tol) {
        return Err(Error::InvalidParams(format!(
            "tolerance {tol:e} outside [{:e}, {:e}]",
            TOL_RANGE.0, TOL_RANGE.1
        )));
    }
    Ok(())
}

fn err_norm(err: &[f64], y0: &[f64], y1: &[f64], tol: f64) -> f64 {
    let n = err.len() as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sk = tol + tol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction). The
/// `stop` callback sees every accepted step and ends the integration when it
/// returns true.
pub fn solve<F, S>(mut rhs: F, t0: f64, y0: &[f64], t1: f64, opts: &SolverOptions, mut stop: S) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    S: FnMut(f64, &[f64]) -> bool,
{
    check_tol(opts.tol)?;
    let n = y0.len();
    let tol = opts.tol;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut sol = Solution {
        dim: n,
        t: vec![t0],
        y: vec![y0.to_vec()],
        steps: Vec::new(),
        rejected: 0,
        stopped: false,
    };
    if t1 == t0 {
        return Ok(sol);
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    rhs(t, &y, &mut k1)?;
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut err = vec![0.0; n];

    let span = (t1 - t0).abs();
    let mut h = match opts.h0 {
        Some(h) => h.abs().min(span),
        None => {
            // Hairer's starting step heuristic, simplified
            let d0 = y.iter().map(|v| (v / (tol + tol * v.abs())).powi(2)).sum::<f64>().sqrt();
            let d1 = y
                .iter()
                .zip(&k1)
                .map(|(v, f)| (f / (tol + tol * v.abs())).powi(2))
                .sum::<f64>()
                .sqrt();
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h0.min(span).min(0.1 * span.max(1e-6))
        }
    } * dir;
    let h_min = 1e-14 * t.abs().max(span);

    let mut rejected_in_row = 0;
    for _ in 0..opts.max_steps {
        if (t1 - t) * dir <= 0.0 {
            break;
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        rhs(t + C2 * h, &ytmp, &mut k2)?;
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &ytmp, &mut k3)?;
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &ytmp, &mut k4)?;
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &ytmp, &mut k5)?;
        for i in 0..n {
            ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + h, &ytmp, &mut k6)?;
        for i in 0..n {
            ynew[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t + h, &ynew, &mut k7)?;
        for i in 0..n {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = err_norm(&err, &y, &ynew, tol);
        if !e.is_finite() {
            h *= 0.25;
            sol.rejected += 1;
            rejected_in_row += 1;
            if h.abs() < h_min || rejected_in_row > 50 {
                return Err(Error::StepFailure { t });
            }
            continue;
        }
        let fac = (0.9 * e.powf(-0.2)).clamp(0.2, 5.0);
        if e <= 1.0 {
            let mut rcont = vec![0.0; 5 * n];
            for i in 0..n {
                let ydiff = ynew[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[i] = y[i];
                rcont[n + i] = ydiff;
                rcont[2 * n + i] = bspl;
                rcont[3 * n + i] = ydiff - h * k7[i] - bspl;
                rcont[4 * n + i] =
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            sol.steps.push(DenseStep { t, h, rcont });
            t += h;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            sol.t.push(t);
            sol.y.push(y.clone());
            // no growth right after a rejection
            let grow = if rejected_in_row > 0 { fac.min(1.0) } else { fac };
            rejected_in_row = 0;
            if stop(t, &y) {
                sol.stopped = true;
                return Ok(sol);
            }
            h *= grow;
        } else {
            sol.rejected += 1;
            rejected_in_row += 1;
            h *= fac.min(1.0);
        }
        if h.abs() < h_min {
            return Err(Error::StepFailure { t });
        }
    }
    if (t1 - t) * dir > 0.0 {
        return Err(Error::StepFailure { t });
    }
    Ok(sol)
}

fn field_rhs<'a>(model: &'a Model, mu: f64) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<()> + 'a {
    move |_t, y, out| {
        let f = model.evaluate(&[y[0], y[1], y[2]], mu)?;
        out[..3].copy_from_slice(&f);
        Ok(())
    }
}

/// Trajectory of a model with dense output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub mu: f64,
    pub solution: Solution,
}

impl Trajectory {
    pub fn state_at(&self, t: f64) -> State {
        let v = self.solution.eval(t);
        [v[0], v[1], v[2]]
    }

    pub fn end(&self) -> State {
        let v = self.solution.y_end();
        [v[0], v[1], v[2]]
    }

    pub fn times(&self) -> &[f64] {
        &self.solution.t
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.solution.y.iter().map(|v| [v[0], v[1], v[2]])
    }
}

/// Integrates the model from `x0` over `t_span`.
pub fn integrate(model: &Model, mu: f64, x0: &State, t_span: (f64, f64), tol: f64) -> Result<Trajectory> {
    if !model.admissible(x0) {
        return Err(Error::NotAdmissible(format!("initial state {x0:?}")));
    }
    let opts = SolverOptions::with_tol(tol);
    let solution = solve(field_rhs(model, mu), t_span.0, x0, t_span.1, &opts, |_, _| false)?;
    Ok(Trajectory { mu, solution })
}

/// Integrates until `stop` returns true or `t_max` is reached.
pub fn integrate_until<S>(model: &Model, mu: f64, x0: &State, t_max: f64, tol: f64, stop: S) -> Result<Trajectory>
where
    S: FnMut(f64, &[f64]) -> bool,
{
    let opts = SolverOptions::with_tol(tol);
    let solution = solve(field_rhs(model, mu), 0.0, x0, t_max, &opts, stop)?;
    Ok(Trajectory { mu, solution })
}

/// Flow map together with its state derivative and `∫ tr D_x F dt`.
#[derive(Clone, Debug)]
pub struct VariationalFlow {
    pub end: State,
    /// `D_x Φ_T(x0)`.
    pub monodromy: Matrix3<f64>,
    pub trace_integral: f64,
    pub solution: Solution,
}

/// Integrates the state with its variational equations over `[0, t_end]`.
pub fn integrate_variational(model: &Model, mu: f64, x0: &State, t_end: f64, tol: f64) -> Result<VariationalFlow> {
    let mut y0 = vec![0.0; 13];
    y0[..3].copy_from_slice(x0);
    for k in 0..3 {
        y0[3 + 4 * k] = 1.0;
    }
    let rhs = |_t: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        let x = [y[0], y[1], y[2]];
        let f = model.evaluate(&x, mu)?;
        let j = model.jacobian(&x, mu)?;
        out[..3].copy_from_slice(&f);
        // column-major 3x3 block
        for c in 0..3 {
            for r in 0..3 {
                out[3 + 3 * c + r] = (0..3).map(|k| j[(r, k)] * y[3 + 3 * c + k]).sum();
            }
        }
        out[12] = j.trace();
        Ok(())
    };
    let opts = SolverOptions::with_tol(tol);
    let solution = solve(rhs, 0.0, &y0, t_end, &opts, |_, _| false)?;
    let y = solution.y_end();
    Ok(VariationalFlow {
        end: [y[0], y[1], y[2]],
        monodromy: Matrix3::from_column_slice(&y[3..12]),
        trace_integral: y[12],
        solution,
    })
}
