//! Hopf point location, assumption checks and the standard coordinate frame.
//!
//! The standard frame puts the Hopf point at the origin, the rotation plane of
//! the `±iω` eigenvalues in the first two coordinates and the line of
//! equilibria along the third, with Jacobian
//!
//! ```text
//!     | 0  -ω  0 |
//! A = | ω   0  0 |
//!     | 0   0  0 |
//! ```
//!
//! and a parameter-dependent translation of the rotation-plane coordinates
//! that removes the transverse parameter drift.

use nalgebra::{Matrix3, Matrix4x3, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::jet::{Y1, Y2, Z};
use crate::models::{JetSource, JetTable, Model, State};

/// A1: residual of the Newton-projected line samples.
pub const A1_RESIDUAL: f64 = 1e-10;
/// A2: allowed mismatch of the spectrum `{0, ±iω}`.
pub const A2_SPECTRUM: f64 = 1e-8;
/// A3..A5: a quantity counts as nonzero above this magnitude.
pub const NONZERO: f64 = 1e-6;
/// Length of the sampled segment of the line of equilibria.
pub const A1_SEGMENT: f64 = 0.2;
pub const A1_SAMPLES: usize = 20;

/// Scale of the line direction `e3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelScale {
    /// Unit Euclidean norm, largest-magnitude component positive.
    UnitNorm,
    /// `e3[index] == value`.
    Component { index: usize, value: f64 },
}

/// Scale and phase of the rotation-plane directions `e1, e2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaneScale {
    /// `|e1|^2 + |e2|^2 = 2`; phase chosen so that `e1[1] = 0` and `e1[0] >= 0`
    /// when possible.
    Default,
    /// `e2` is the projection of `anchor` onto the rotation plane and
    /// `e1 = -J e2 / ω`.
    Anchor { anchor: [f64; 3] },
}

/// How the free scales of the standard frame are fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameNormalization {
    pub kernel: KernelScale,
    pub plane: PlaneScale,
}

impl Default for FrameNormalization {
    fn default() -> Self {
        FrameNormalization { kernel: KernelScale::UnitNorm, plane: PlaneScale::Default }
    }
}

/// Affine coordinates `X = origin + basis (w - mu * shift)` bringing the field
/// into standard form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardFrame {
    pub origin: State,
    /// Columns `e1, e2, e3`.
    pub basis: [[f64; 3]; 3],
    /// Translation per unit `mu` of the rotation-plane coordinates; third entry is 0.
    pub mu_shift: [f64; 3],
    pub omega: f64,
}

impl StandardFrame {
    pub fn basis_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, c| self.basis[c][r])
    }

    pub fn shift_vector(&self) -> Vector3<f64> {
        Vector3::from(self.mu_shift)
    }

    pub fn column(&self, k: usize) -> Vector3<f64> {
        Vector3::from(self.basis[k])
    }

    /// Frame coordinates of the original state `x` at parameter `mu`.
    pub fn to_frame(&self, x: &State, mu: f64) -> Vector3<f64> {
        let inv = self.basis_matrix().try_inverse().expect("frame basis is invertible");
        inv * (Vector3::from(*x) - Vector3::from(self.origin)) + mu * self.shift_vector()
    }

    /// Original state at frame coordinates `w` and parameter `mu`.
    pub fn from_frame(&self, w: &Vector3<f64>, mu: f64) -> State {
        let v = Vector3::from(self.origin) + self.basis_matrix() * (w - mu * self.shift_vector());
        [v[0], v[1], v[2]]
    }

    /// Jet of the field in frame coordinates, from a jet at the frame origin.
    pub fn standard_jet(&self, jet: &JetTable) -> Result<JetTable> {
        jet.transformed(&self.basis_matrix(), &self.shift_vector())
    }

    /// Transformed Jacobian at the origin, expected to equal the rotation matrix A.
    pub fn jacobian_defect(&self, jet: &JetTable) -> Result<f64> {
        let sj = self.standard_jet(jet)?;
        let a = rotation_matrix(self.omega);
        Ok((sj.jacobian() - a).abs().max())
    }

    /// Same frame with the rotation plane turned by `theta`, the plane scaled
    /// by `plane_scale` and the line direction scaled by `line_scale`.
    pub fn perturbed(&self, jet: &JetTable, theta: f64, plane_scale: f64, line_scale: f64) -> Result<StandardFrame> {
        if !(plane_scale > 0.0 && line_scale > 0.0) {
            return Err(Error::InvalidParams("frame scalings must be positive".into()));
        }
        let (e1, e2, e3) = (self.column(0), self.column(1), self.column(2));
        let (s, c) = theta.sin_cos();
        let f1 = plane_scale * (c * e1 + s * e2);
        let f2 = plane_scale * (-s * e1 + c * e2);
        let f3 = line_scale * e3;
        with_basis(jet, self.origin, Matrix3::from_columns(&[f1, f2, f3]), self.omega)
    }
}

pub fn rotation_matrix(omega: f64) -> Matrix3<f64> {
    Matrix3::new(0.0, -omega, 0.0, omega, 0.0, 0.0, 0.0, 0.0, 0.0)
}

/// Eigen-structure `{ν0, ±iω}` of a Jacobian on the line of equilibria.
#[derive(Clone, Copy, Debug)]
struct Spectrum {
    zero: Complex64,
    pair: Complex64,
    other: Complex64,
}

fn spectrum(j: &Matrix3<f64>) -> Spectrum {
    let ev = j.complex_eigenvalues();
    let mut v = [ev[0], ev[1], ev[2]];
    v.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    let zero = v[0];
    // pair member with positive imaginary part first
    let (pair, other) = if v[1].im >= v[2].im { (v[1], v[2]) } else { (v[2], v[1]) };
    Spectrum { zero, pair, other }
}

/// Average real part of the two eigenvalues other than the one closest to 0.
fn pair_real_part(j: &Matrix3<f64>) -> f64 {
    let s = spectrum(j);
    0.5 * (s.pair.re + s.other.re)
}

fn complex_cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Null vector of `J - νI` from the best-conditioned cross product of its rows.
fn eigenvector(j: &Matrix3<f64>, nu: Complex64) -> Result<[Complex64; 3]> {
    let rows: Vec<[Complex64; 3]> = (0..3)
        .map(|r| {
            [0, 1, 2].map(|c| {
                let d = if r == c { nu } else { Complex64::new(0.0, 0.0) };
                Complex64::new(j[(r, c)], 0.0) - d
            })
        })
        .collect();
    let mut best = None;
    let mut best_norm = 0.0;
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let v = complex_cross(rows[a], rows[b]);
        let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n > best_norm {
            best_norm = n;
            best = Some(v);
        }
    }
    let scale = j.abs().max().max(1.0);
    match best {
        Some(v) if best_norm > 1e-12 * scale * scale => Ok(v.map(|c| c / best_norm)),
        _ => Err(Error::DefectiveSpectrum(format!("eigenvalue {nu} is not simple"))),
    }
}

fn model_jacobian(model: &Model, x: &State, mu: f64) -> Result<Matrix3<f64>> {
    model.jacobian(x, mu)
}

fn norm(v: &State) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Newton solve of `F(X; 0) = 0` together with a vanishing real part of the
/// complex eigenvalue pair, starting from `seed`.
pub fn locate_hopf_point(model: &Model, seed: &State) -> Result<State> {
    const MAX_ITER: usize = 50;
    let g = |x: &State| -> Result<f64> { Ok(pair_real_part(&model_jacobian(model, x, 0.0)?)) };
    let mut x = *seed;
    let mut last = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let f = model.evaluate(&x, 0.0)?;
        let gx = g(&x)?;
        let fnorm = norm(&f);
        last = fnorm.max(gx.abs());
        if fnorm < 1e-12 && gx.abs() < 1e-10 {
            return validate_hopf(model, x);
        }
        let j = model_jacobian(model, &x, 0.0)?;
        let mut grad = [0.0; 3];
        for (c, gc) in grad.iter_mut().enumerate() {
            let h = 1e-6 * x[c].abs().max(1.0);
            let mut xp = x;
            let mut xm = x;
            xp[c] += h;
            xm[c] -= h;
            *gc = (g(&xp)? - g(&xm)?) / (2.0 * h);
        }
        let mut m = Matrix4x3::zeros();
        for r in 0..3 {
            for c in 0..3 {
                m[(r, c)] = j[(r, c)];
            }
        }
        for c in 0..3 {
            m[(3, c)] = grad[c];
        }
        let rhs = Vector4::new(f[0], f[1], f[2], gx);
        let svd = m.svd(true, true);
        let step = svd
            .solve(&rhs, 1e-13 * svd.singular_values.max())
            .map_err(|e| Error::NotHopf(e.to_string()))?;
        for c in 0..3 {
            x[c] -= step[c];
        }
        if !x.iter().all(|c| c.is_finite()) {
            break;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, residual: last })
}

fn validate_hopf(model: &Model, x: State) -> Result<State> {
    let j = model_jacobian(model, &x, 0.0)?;
    let s = spectrum(&j);
    let scale = j.abs().max().max(1e-300);
    if s.zero.norm() > 1e-8 * scale.max(1.0) {
        return Err(Error::NotHopf(format!("no zero eigenvalue (closest {})", s.zero)));
    }
    if s.pair.im <= 1e-8 * scale.max(1.0) {
        return Err(Error::NotHopf(format!("no imaginary pair (eigenvalues {} {})", s.pair, s.other)));
    }
    Ok(x)
}

/// Frame from a jet at the Hopf point, with the default normalization.
pub fn build_standard_frame(jet: &JetTable) -> Result<StandardFrame> {
    build_standard_frame_with(jet, &FrameNormalization::default())
}

pub fn build_standard_frame_with(jet: &JetTable, norm: &FrameNormalization) -> Result<StandardFrame> {
    let j = jet.jacobian();
    let s = spectrum(&j);
    let scale = j.abs().max().max(1.0);
    if s.pair.im <= 1e-8 * scale {
        return Err(Error::DefectiveSpectrum(format!(
            "eigenvalues {}, {}, {} have no simple imaginary pair",
            s.zero, s.pair, s.other
        )));
    }
    if (s.pair - s.zero).norm() < 1e-8 * scale {
        return Err(Error::DefectiveSpectrum("zero eigenvalue collides with the pair".into()));
    }
    let omega = s.pair.im;

    // line direction
    let k = eigenvector(&j, Complex64::new(s.zero.re, 0.0))?;
    let kv = Vector3::new(k[0].re, k[1].re, k[2].re);
    let kv = if kv.norm() > 0.5 * k.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() {
        kv
    } else {
        Vector3::new(k[0].im, k[1].im, k[2].im)
    };
    let e3 = match norm.kernel {
        KernelScale::UnitNorm => {
            let u = kv.normalize();
            let imax = u.iamax();
            if u[imax] < 0.0 {
                -u
            } else {
                u
            }
        }
        KernelScale::Component { index, value } => {
            if index > 2 || kv[index].abs() < 1e-12 * kv.norm() {
                return Err(Error::InvalidParams(format!(
                    "line direction has no component {index} to normalize"
                )));
            }
            kv * (value / kv[index])
        }
    };

    // rotation plane: q = e1 - i e2 with J q = iω q
    let q = eigenvector(&j, s.pair)?;
    let mut e1 = Vector3::new(q[0].re, q[1].re, q[2].re);
    let mut e2 = Vector3::new(-q[0].im, -q[1].im, -q[2].im);
    let scale2 = (2.0 / (e1.norm_squared() + e2.norm_squared())).sqrt();
    e1 *= scale2;
    e2 *= scale2;
    match norm.plane {
        PlaneScale::Default => {
            let theta = if e1[1].abs().max(e2[1].abs()) > 1e-12 {
                let t = (-e1[1]).atan2(e2[1]);
                let c1 = t.cos() * e1[0] + t.sin() * e2[0];
                if c1 < 0.0 {
                    t + std::f64::consts::PI
                } else {
                    t
                }
            } else {
                e2[0].atan2(e1[0])
            };
            let (sn, cs) = theta.sin_cos();
            let f1 = cs * e1 + sn * e2;
            let f2 = -sn * e1 + cs * e2;
            e1 = f1;
            e2 = f2;
        }
        PlaneScale::Anchor { anchor } => {
            let b = Matrix3::from_columns(&[e1, e2, e3]);
            let c = b
                .try_inverse()
                .ok_or_else(|| Error::DefectiveSpectrum("singular eigenbasis".into()))?
                * Vector3::from(anchor);
            let a2 = c[0] * e1 + c[1] * e2;
            if a2.norm() < 1e-12 {
                return Err(Error::InvalidParams("frame anchor is orthogonal to the rotation plane".into()));
            }
            e2 = a2;
            e1 = -(j * e2) / omega;
        }
    }
    with_basis(jet, jet.point, Matrix3::from_columns(&[e1, e2, e3]), omega)
}

/// Completes a frame for the given basis by computing the parameter shift.
fn with_basis(jet: &JetTable, origin: State, basis: Matrix3<f64>, omega: f64) -> Result<StandardFrame> {
    if basis.determinant().abs() < 1e-14 {
        return Err(Error::DefectiveSpectrum("singular frame basis".into()));
    }
    let raw = jet.transformed(&basis, &Vector3::zeros())?;
    let mu_shift = [raw.dmu(Y2) / omega, -raw.dmu(Y1) / omega, 0.0];
    let cols = [basis.column(0), basis.column(1), basis.column(2)];
    Ok(StandardFrame {
        origin,
        basis: cols.map(|c| [c[0], c[1], c[2]]),
        mu_shift,
        omega,
    })
}

/// Pass/fail for each assumption.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub a1: bool,
    pub a2: bool,
    pub a3: bool,
    pub a4: bool,
    pub a5: bool,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        self.a1 && self.a2 && self.a3 && self.a4 && self.a5
    }

    /// Names of the failed assumptions.
    pub fn failed(&self) -> Vec<&'static str> {
        [("A1", self.a1), ("A2", self.a2), ("A3", self.a3), ("A4", self.a4), ("A5", self.a5)]
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub hopf_point: State,
    /// Largest `|F|` over the Newton-projected samples of the line.
    pub a1_line_residual: f64,
    /// Smallest ratio of projected distance from the Hopf point to sampled offset.
    pub a1_spread: f64,
    /// Eigenvalues at the Hopf point as `[re, im]`.
    pub a2_spectrum: [[f64; 2]; 3],
    pub a2_mismatch: f64,
    pub omega: f64,
    /// d/dz div_y f^y in the standard frame.
    pub a3_crossing: f64,
    /// Laplacian in y of f^z.
    pub a4_nondegeneracy: f64,
    /// d/dmu f^z.
    pub a5_drift: f64,
    /// |d/dmu f^y| after the parameter shift (zero by construction).
    pub a5_transverse: f64,
    pub verdicts: Verdicts,
    pub thresholds: Thresholds,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub a1_residual: f64,
    pub a2_spectrum: f64,
    pub nonzero: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { a1_residual: A1_RESIDUAL, a2_spectrum: A2_SPECTRUM, nonzero: NONZERO }
    }
}

impl AssumptionReport {
    pub fn table(&self) -> String {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        let v = &self.verdicts;
        let mut s = String::new();
        s.push_str(&format!("{:<4} {:<6} {}\n", "", "", "value"));
        s.push_str(&format!(
            "{:<4} {:<6} line residual {:.3e}, spread {:.3}\n",
            "A1",
            mark(v.a1),
            self.a1_line_residual,
            self.a1_spread
        ));
        s.push_str(&format!(
            "{:<4} {:<6} spectrum mismatch {:.3e}, omega {:.6}\n",
            "A2",
            mark(v.a2),
            self.a2_mismatch,
            self.omega
        ));
        s.push_str(&format!("{:<4} {:<6} d_z div_y f^y = {:.6e}\n", "A3", mark(v.a3), self.a3_crossing));
        s.push_str(&format!("{:<4} {:<6} lap_y f^z = {:.6e}\n", "A4", mark(v.a4), self.a4_nondegeneracy));
        s.push_str(&format!(
            "{:<4} {:<6} d_mu f^z = {:.6e}, |d_mu f^y| = {:.1e}\n",
            "A5",
            mark(v.a5),
            self.a5_drift,
            self.a5_transverse
        ));
        s
    }
}

/// Everything needed downstream of the assumption checks.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub report: AssumptionReport,
    pub frame: Option<StandardFrame>,
    /// Jet in frame coordinates (present whenever `frame` is).
    pub standard_jet: Option<JetTable>,
}

/// Checks A1..A5 at `x_h` with the model's preferred frame normalization.
pub fn check_assumptions(model: &Model, x_h: &State) -> AssumptionReport {
    analyze(model, x_h, &model.frame_normalization(), JetSource::Auto).report
}

/// Assumption checks plus the frame and the standard-frame jet.
pub fn analyze(model: &Model, x_h: &State, norm: &FrameNormalization, source: JetSource) -> Analysis {
    let th = Thresholds::default();
    let (a1_line_residual, a1_spread) = line_check(model, x_h);
    let a1 = a1_line_residual < th.a1_residual && a1_spread > 0.5;

    let mut report = AssumptionReport {
        hopf_point: *x_h,
        a1_line_residual,
        a1_spread,
        a2_spectrum: [[f64::NAN; 2]; 3],
        a2_mismatch: f64::INFINITY,
        omega: f64::NAN,
        a3_crossing: f64::NAN,
        a4_nondegeneracy: f64::NAN,
        a5_drift: f64::NAN,
        a5_transverse: f64::NAN,
        verdicts: Verdicts { a1, a2: false, a3: false, a4: false, a5: false },
        thresholds: th,
    };

    let jet = match model.jet(x_h, 0.0, source) {
        Ok(j) => j,
        Err(_) => return Analysis { report, frame: None, standard_jet: None },
    };
    let j = jet.jacobian();
    let s = spectrum(&j);
    report.a2_spectrum = [s.zero, s.pair, s.other].map(|c| [c.re, c.im]);
    report.omega = s.pair.im;
    let mismatch = s
        .zero
        .norm()
        .max(s.pair.re.abs())
        .max((s.other - s.pair.conj()).norm());
    report.a2_mismatch = mismatch;
    report.verdicts.a2 = mismatch < th.a2_spectrum && s.pair.im > th.a2_spectrum;

    let frame = match build_standard_frame_with(&jet, norm) {
        Ok(f) => f,
        Err(_) => return Analysis { report, frame: None, standard_jet: None },
    };
    let sj = match frame.standard_jet(&jet) {
        Ok(sj) => sj,
        Err(_) => return Analysis { report, frame: None, standard_jet: None },
    };
    report.a3_crossing = sj.d(Y1, &[Y1, Z]) + sj.d(Y2, &[Y2, Z]);
    report.a4_nondegeneracy = sj.d(Z, &[Y1, Y1]) + sj.d(Z, &[Y2, Y2]);
    report.a5_drift = sj.dmu(Z);
    report.a5_transverse = sj.dmu(Y1).abs().max(sj.dmu(Y2).abs());
    report.verdicts.a3 = report.a3_crossing.abs() > th.nonzero;
    report.verdicts.a4 = report.a4_nondegeneracy.abs() > th.nonzero;
    report.verdicts.a5 = report.a5_drift.abs() > th.nonzero && report.a5_transverse < 1e-9;
    Analysis { report, frame: Some(frame), standard_jet: Some(sj) }
}

/// Samples the kernel direction around `x_h`, projects each sample back onto
/// `F = 0` by Newton iteration with the pseudo-inverse, and returns the worst
/// residual and the smallest spread ratio `|P(x) - x_h| / |x - x_h|`.
fn line_check(model: &Model, x_h: &State) -> (f64, f64) {
    let j = match model_jacobian(model, x_h, 0.0) {
        Ok(j) => j,
        Err(_) => return (f64::INFINITY, 0.0),
    };
    let dir = match eigenvector(&j, Complex64::new(spectrum(&j).zero.re, 0.0)) {
        Ok(k) => {
            let v = Vector3::new(k[0].re, k[1].re, k[2].re);
            if v.norm() > 1e-8 {
                v.normalize()
            } else {
                Vector3::new(k[0].im, k[1].im, k[2].im).normalize()
            }
        }
        Err(_) => return (f64::INFINITY, 0.0),
    };
    let half = 0.5 * A1_SEGMENT;
    let mut worst: f64 = 0.0;
    let mut spread = f64::INFINITY;
    for k in 0..A1_SAMPLES {
        // offsets spread over [-half, half], skipping 0
        let t = -half + A1_SEGMENT * (k as f64 + 0.5) / A1_SAMPLES as f64;
        let start = Vector3::from(*x_h) + t * dir;
        let mut x = [start[0], start[1], start[2]];
        let mut res = f64::INFINITY;
        for _ in 0..30 {
            let f = match model.evaluate(&x, 0.0) {
                Ok(f) => f,
                Err(_) => return (f64::INFINITY, 0.0),
            };
            res = norm(&f);
            if res < 1e-14 {
                break;
            }
            let jx = match model_jacobian(model, &x, 0.0) {
                Ok(m) => m,
                Err(_) => return (f64::INFINITY, 0.0),
            };
            let svd = jx.svd(true, true);
            let Ok(step) = svd.solve(&Vector3::from(f), 1e-10 * svd.singular_values.max()) else {
                return (f64::INFINITY, 0.0);
            };
            for c in 0..3 {
                x[c] -= step[c];
            }
        }
        worst = worst.max(res);
        let moved = (Vector3::from(x) - Vector3::from(*x_h)).norm();
        spread = spread.min(moved / t.abs());
    }
    (worst, spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin::{ClassicalHopf, PredatorPrey, SyntheticNormalForm};

    fn pp() -> Model {
        PredatorPrey { delta1: 1.0, delta2: 1.0, lambda: 0.3, alpha1: 0.2, alpha2: 0.6 }.model().unwrap()
    }

    #[test]
    fn predator_prey_hopf_point() {
        let x = locate_hopf_point(&pp(), &[0.15, 0.38, 0.31]).unwrap();
        for (a, b) in x.iter().zip([0.125, 0.405, 0.3]) {
            assert!((a - b).abs() < 1e-10, "{x:?}");
        }
    }

    #[test]
    fn predator_prey_assumptions() {
        let m = pp();
        let r = check_assumptions(&m, &[0.125, 0.405, 0.3]);
        assert!(r.verdicts.all(), "{}", r.table());
        assert!((r.omega * r.omega - 0.3).abs() < 1e-12);
        assert!((r.a4_nondegeneracy - 0.4).abs() < 1e-12, "{}", r.a4_nondegeneracy);
        assert!((r.a3_crossing + 2.0 * 4.0 / 27.0).abs() < 1e-12, "{}", r.a3_crossing);
        assert!((r.a5_drift + 0.225).abs() < 1e-12, "{}", r.a5_drift);
    }

    #[test]
    fn standard_form_jacobian() {
        for m in [pp(), SyntheticNormalForm { a: 1.0, b: -2.0, c: 0.5, d: 1.0, omega: 1.7 }.model().unwrap()] {
            let x = if m.name == "predator_prey" { [0.125, 0.405, 0.3] } else { [0.0; 3] };
            for norm in [FrameNormalization::default(), m.frame_normalization()] {
                let jet = m.jet(&x, 0.0, JetSource::Exact).unwrap();
                let f = build_standard_frame_with(&jet, &norm).unwrap();
                assert!(f.jacobian_defect(&jet).unwrap() < 1e-9);
                let sj = f.standard_jet(&jet).unwrap();
                assert!(sj.dmu(Y1).abs() < 1e-12 && sj.dmu(Y2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn default_frame_of_standard_system_is_identity() {
        let m = SyntheticNormalForm { a: 1.0, b: 1.0, c: 1.0, d: 0.0, omega: 2.0 }.model().unwrap();
        let jet = m.jet(&[0.0; 3], 0.0, JetSource::Exact).unwrap();
        let f = build_standard_frame(&jet).unwrap();
        assert!((f.basis_matrix() - Matrix3::identity()).abs().max() < 1e-12, "{:?}", f.basis);
        assert!((f.omega - 2.0).abs() < 1e-14);
    }

    #[test]
    fn frame_round_trip() {
        let m = pp();
        let jet = m.jet(&[0.125, 0.405, 0.3], 0.0, JetSource::Exact).unwrap();
        let f = build_standard_frame_with(&jet, &m.frame_normalization()).unwrap();
        let x = [0.2, 0.3, 0.35];
        let w = f.to_frame(&x, 0.01);
        let back = f.from_frame(&w, 0.01);
        for k in 0..3 {
            assert!((back[k] - x[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn classical_hopf_fails_a4() {
        let m = ClassicalHopf { sign: 1.0, omega: 1.0 }.model().unwrap();
        let x = locate_hopf_point(&m, &[0.01, -0.02, 0.05]).unwrap();
        let r = check_assumptions(&m, &x);
        assert!(!r.verdicts.a1 || !r.verdicts.a4);
        assert!(!r.verdicts.a4);
        assert_eq!(r.verdicts.failed().contains(&"A4"), true);
    }

    #[test]
    fn not_hopf_without_rotation() {
        let m = SyntheticNormalForm { a: 1.0, b: 1.0, c: 1.0, d: 0.0, omega: 1.0 }.model().unwrap();
        let jet = m.jet(&[0.0, 0.0, 0.5], 0.0, JetSource::Exact).unwrap();
        // off the Hopf point the pair has nonzero real part but is still complex
        assert!(build_standard_frame(&jet).is_ok());
    }
}
