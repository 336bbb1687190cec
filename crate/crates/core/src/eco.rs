//! Two predators competing for one prey.
//!
//! The predators have break-even concentrations `lambda` and `lambda + mu`.
//! At `mu = 0` the interior equilibria form a line, and in the admissible
//! region
//!
//! ```text
//! delta1, delta2 > 0,  0 < lambda < 1/2,  0 < alpha1 < 1 - 2 lambda < alpha2 < 1
//! ```
//!
//! the line carries an elliptic Hopf point whose branch, for `mu > 0`, is
//! stable. The closed forms here are checked against the generic engine.

use rand::distributions::{Distribution, Open01, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{analyze_at, BifurcationType};
use crate::coefficients::PartialCoefficients;
use crate::error::{Error, Result};
use crate::frame::{FrameNormalization, KernelScale, PlaneScale};
use crate::models::builtin::PredatorPrey;
use crate::models::{JetSource, Model, State};

/// Frame convention for the predator-prey model: the prey axis spans the
/// second rotation direction and the line direction has unit `x2` component.
pub const FRAME: FrameNormalization = FrameNormalization {
    kernel: KernelScale::Component { index: 1, value: 1.0 },
    plane: PlaneScale::Anchor { anchor: [0.0, 0.0, 1.0] },
};

/// Default growth-rate interval for sweeps.
pub const DEFAULT_DELTA_BOUNDS: DeltaBounds = DeltaBounds { lo: 0.05, hi: 20.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcoParams {
    pub delta1: f64,
    pub delta2: f64,
    pub lambda: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Shift of the second break-even concentration.
    #[serde(default)]
    pub mu: f64,
}

impl EcoParams {
    pub fn new(delta1: f64, delta2: f64, lambda: f64, alpha1: f64, alpha2: f64) -> EcoParams {
        EcoParams { delta1, delta2, lambda, alpha1, alpha2, mu: 0.0 }
    }

    /// `1 - 2 lambda - alpha1`.
    pub fn ell1(&self) -> f64 {
        1.0 - 2.0 * self.lambda - self.alpha1
    }

    /// `2 lambda + alpha2 - 1`.
    pub fn ell2(&self) -> f64 {
        2.0 * self.lambda + self.alpha2 - 1.0
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda + self.mu
    }

    pub fn is_admissible(&self) -> bool {
        self.delta1 > 0.0
            && self.delta2 > 0.0
            && self.lambda > 0.0
            && self.lambda < 0.5
            && self.alpha1 > 0.0
            && self.alpha2 < 1.0
            && self.ell1() > 0.0
            && self.ell2() > 0.0
    }

    pub fn check_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::NotAdmissible(format!(
                "delta = ({}, {}), lambda = {}, alpha = ({}, {}), l1 = {:.6}, l2 = {:.6}",
                self.delta1,
                self.delta2,
                self.lambda,
                self.alpha1,
                self.alpha2,
                self.ell1(),
                self.ell2()
            )))
        }
    }

    /// The vector field in `(x1, x2, s)`; `mu` is left to the caller.
    pub fn model(&self) -> Result<Model> {
        PredatorPrey {
            delta1: self.delta1,
            delta2: self.delta2,
            lambda: self.lambda,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
        }
        .model()
    }
}

/// Hopf point on the line of equilibria at `mu = 0`.
pub fn hopf_point(p: &EcoParams) -> Result<State> {
    if p.alpha1 == p.alpha2 {
        return Err(Error::DegenerateAlphas);
    }
    p.check_admissible()?;
    let (l, a1, a2) = (p.lambda, p.alpha1, p.alpha2);
    let d = a2 - a1;
    Ok([(l + a1).powi(2) * p.ell2() / d, (l + a2).powi(2) * p.ell1() / d, l])
}

/// Left side minus right side of the line equation
/// `x1/(lambda+alpha1) + x2/(lambda+alpha2) = 1 - lambda`, with `s = lambda`.
pub fn line_residual(p: &EcoParams, x: &State) -> f64 {
    let (l, a1, a2) = (p.lambda, p.alpha1, p.alpha2);
    (x[0] / (l + a1) + x[1] / (l + a2) - (1.0 - l)).abs() + (x[2] - l).abs()
}

pub fn h1(lambda: f64, alpha1: f64, alpha2: f64) -> f64 {
    let (l, a1, a2) = (lambda, alpha1, alpha2);
    -l + 2.0 * a2 + l * a1 - 8.0 * l * a2 - 2.0 * a1 * a2 - 2.0 * a2 * a2
}

pub fn h2(lambda: f64, alpha1: f64, alpha2: f64) -> f64 {
    let (l, a1, a2) = (lambda, alpha1, alpha2);
    // same term order as `h1` with the alphas swapped, so the mirror identity holds bitwise
    l - 2.0 * a1 - l * a2 + 8.0 * l * a1 + 2.0 * a2 * a1 + 2.0 * a1 * a1
}

/// Closed-form coefficients of the cylindrical form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub coefficients: PartialCoefficients,
    pub h1: f64,
    pub h2: f64,
    /// Stability coefficient assembled from the closed forms.
    pub sigma: f64,
}

pub fn closed_form_coefficients(p: &EcoParams) -> Result<ClosedForms> {
    p.check_admissible()?;
    let (l, a1, a2, d1, d2) = (p.lambda, p.alpha1, p.alpha2, p.delta1, p.delta2);
    let (l1, l2) = (p.ell1(), p.ell2());
    let (la1, la2) = (l + a1, l + a2);
    let ls = l1 + l2;
    let w2 = l * (d1 * l2 + d2 * l1) / ls;
    let w4 = w2 * w2;
    let hh1 = h1(l, a1, a2);
    let hh2 = h2(l, a1, a2);

    let beta2 = -l * ls / (2.0 * la1 * la2 * la2);
    let beta5 = l * d1 * d2 * l1 * l2 / (2.0 * la1 * w2 * ls);
    let gamma5 = -l * la2 * d1 * d2 * l1 * l2 / (w2 * ls * ls);
    // the second factor of the first denominator is (lambda + alpha2)^2
    let beta3 = l * (la1 * d1 * l2 * hh1 - la2 * d2 * l1 * hh2) / (8.0 * la1 * la1 * la2 * la2 * w2 * ls)
        + l * l * d1 * d2 * l1 * l2 * (la1 * d2 - la2 * d1) / (4.0 * la1 * la1 * la2 * la2 * w4 * ls);
    let beta6 = l * l * (la1 + l1) * d1 * d2 * (d1 * l2 - d2 * l1) / (2.0 * la1 * la1 * la2 * la2 * w4);
    let gamma7 = -l * l * d1 * d2 * (la1 * d1 * l2 * l2 - la2 * d2 * l1 * l1) / (la1 * la2 * w4 * ls * ls);

    let g2 = gamma5 * gamma5;
    Ok(ClosedForms {
        coefficients: PartialCoefficients {
            omega: Some(w2.sqrt()),
            beta2: Some(beta2),
            beta3: Some(beta3),
            beta5: Some(beta5),
            beta6: Some(beta6),
            gamma5: Some(gamma5),
            gamma7: Some(gamma7),
        },
        h1: hh1,
        h2: hh2,
        sigma: 2.0 * beta3 * g2 - beta5 * gamma5 * gamma7 + beta6 * g2,
    })
}

/// `(lambda+alpha1) delta1 l2 H1 - (lambda+alpha2) delta2 l1 H2`; negative
/// exactly when the branch is stable.
pub fn stability_margin(p: &EcoParams) -> Result<f64> {
    p.check_admissible()?;
    let (l, a1, a2) = (p.lambda, p.alpha1, p.alpha2);
    Ok((l + a1) * p.delta1 * p.ell2() * h1(l, a1, a2) - (l + a2) * p.delta2 * p.ell1() * h2(l, a1, a2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaBounds {
    pub lo: f64,
    pub hi: f64,
}

impl Default for DeltaBounds {
    fn default() -> Self {
        DEFAULT_DELTA_BOUNDS
    }
}

impl DeltaBounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0 && self.lo < self.hi) {
            return Err(Error::InvalidBounds(format!("need 0 < lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }
}

/// `n` admissible parameter sets drawn uniformly from the tetrahedra
/// `lambda ~ U(0, 1/2)`, `alpha1 ~ U(0, 1-2 lambda)`, `alpha2 ~ U(1-2 lambda, 1)`,
/// with growth rates uniform in `bounds`. Deterministic per seed.
pub fn sample_region(n: usize, seed: u64, bounds: DeltaBounds) -> Result<Vec<EcoParams>> {
    bounds.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = Uniform::new(bounds.lo, bounds.hi);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u: f64 = Open01.sample(&mut rng);
        let lambda = 0.5 * u;
        let gap = 1.0 - 2.0 * lambda;
        let u1: f64 = Open01.sample(&mut rng);
        let u2: f64 = Open01.sample(&mut rng);
        let p = EcoParams::new(delta.sample(&mut rng), delta.sample(&mut rng), lambda, gap * u1, gap + (1.0 - gap) * u2);
        // rounding can land exactly on a face
        if p.is_admissible() {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// `(0,0,0)`, `(0,0,1)`, `E1 = (x1*, 0, lambda1)`, `E2 = (0, x2*, lambda2)`.
    pub equilibria: [State; 4],
    /// `2 lambda_j + alpha_j - 1`: negative means a boundary limit cycle
    /// surrounds `E_j` in its quadrant, positive that `E_j` attracts it.
    pub hopf_indicators: [f64; 2],
    /// Sign of `alpha1 - alpha2`, the sign of the Lyapunov derivative at `mu = 0`.
    pub lyapunov_drift_sign: i8,
}

pub fn boundary_report(p: &EcoParams) -> Result<BoundaryReport> {
    let lambdas = [p.lambda, p.lambda2()];
    let alphas = [p.alpha1, p.alpha2];
    if let Some(j) = lambdas.iter().position(|&l| !(l > 0.0 && l < 1.0)) {
        return Err(Error::NoCoexistencePossible(format!(
            "break-even concentration of predator {} is {}, outside (0, 1)",
            j + 1,
            lambdas[j]
        )));
    }
    let star = |j: usize| (lambdas[j] + alphas[j]) * (1.0 - lambdas[j]);
    let d = p.alpha1 - p.alpha2;
    Ok(BoundaryReport {
        equilibria: [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [star(0), 0.0, lambdas[0]], [0.0, star(1), lambdas[1]]],
        hopf_indicators: [0, 1].map(|j| 2.0 * lambdas[j] + alphas[j] - 1.0),
        lyapunov_drift_sign: if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            0
        },
    })
}

/// `V = ln(x1)/delta1 - (lambda+alpha2)/(delta2 (lambda+alpha1)) ln(x2)`.
pub fn lyapunov(p: &EcoParams, x: &State) -> f64 {
    let (l, a1, a2) = (p.lambda, p.alpha1, p.alpha2);
    x[0].ln() / p.delta1 - (l + a2) / (p.delta2 * (l + a1)) * x[1].ln()
}

/// `dV/dt` at `mu = 0`, which depends on the prey level only.
pub fn lyapunov_rate(p: &EcoParams, x: &State) -> f64 {
    let (l, a1, a2, s) = (p.lambda, p.alpha1, p.alpha2, x[2]);
    (a1 - a2) * (s - l).powi(2) / ((l + a1) * (s + a1) * (s + a2))
}

/// One row of a region sweep; the coefficients come from the generic engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: EcoParams,
    pub ell1: f64,
    pub ell2: f64,
    pub omega: f64,
    pub beta2: f64,
    pub beta5: f64,
    pub gamma5: f64,
    pub gamma7: f64,
    pub sigma: f64,
    pub margin: f64,
    pub direction: i8,
    /// Bifurcation type, or the error that stopped the classification.
    pub outcome: std::result::Result<BifurcationType, String>,
}

impl SweepRow {
    pub fn is_es(&self) -> bool {
        matches!(self.outcome, Ok(BifurcationType::ES))
    }
}

pub fn sweep_one(p: &EcoParams) -> Result<SweepRow> {
    let margin = stability_margin(p)?;
    let x_h = hopf_point(p)?;
    let nan = f64::NAN;
    let mut row = SweepRow {
        params: *p,
        ell1: p.ell1(),
        ell2: p.ell2(),
        omega: nan,
        beta2: nan,
        beta5: nan,
        gamma5: nan,
        gamma7: nan,
        sigma: nan,
        margin,
        direction: 0,
        outcome: Err(String::new()),
    };
    match analyze_at(&p.model()?, &x_h, JetSource::Exact) {
        Ok(a) => {
            let c = &a.coefficients;
            row.omega = c.omega;
            row.beta2 = c.beta2;
            row.beta5 = c.beta5;
            row.gamma5 = c.gamma5;
            row.gamma7 = c.gamma7;
            row.sigma = a.classification.sigma;
            row.direction = a.classification.direction;
            row.outcome = Ok(a.classification.kind);
        }
        Err(e) => row.outcome = Err(e.to_string()),
    }
    Ok(row)
}

/// Classifies every sample in parallel; row order follows `samples`.
pub fn sweep(samples: &[EcoParams]) -> Result<Vec<SweepRow>> {
    samples.par_iter().map(sweep_one).collect()
}

pub const SWEEP_COLUMNS: [&str; 15] = [
    "delta1", "delta2", "lambda", "alpha1", "alpha2", "l1", "l2", "omega", "beta2", "beta5", "gamma5", "gamma7",
    "sigma", "margin", "type",
];

/// Comma-separated table with a header row.
pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut out = SWEEP_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let p = &r.params;
        let nums = [
            p.delta1, p.delta2, p.lambda, p.alpha1, p.alpha2, r.ell1, r.ell2, r.omega, r.beta2, r.beta5, r.gamma5,
            r.gamma7, r.sigma, r.margin,
        ];
        for v in nums {
            out.push_str(&v.to_string());
            out.push(',');
        }
        match &r.outcome {
            Ok(k) => out.push_str(&k.to_string()),
            Err(_) => out.push_str("error"),
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::closed_form_check;

    fn interior() -> EcoParams {
        EcoParams::new(1.0, 1.0, 0.3, 0.2, 0.6)
    }

    #[test]
    fn interior_sample_values() {
        let p = interior();
        let x = hopf_point(&p).unwrap();
        for (a, b) in x.iter().zip([0.125, 0.405, 0.3]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(line_residual(&p, &x) < 1e-14);
        let cf = closed_form_coefficients(&p).unwrap();
        let c = cf.coefficients;
        assert!((c.omega.unwrap().powi(2) - 0.3).abs() < 1e-14);
        assert!((c.beta2.unwrap() + 4.0 / 27.0).abs() < 1e-12);
        assert!((c.beta5.unwrap() - 0.1).abs() < 1e-12);
        assert!((c.gamma5.unwrap() + 0.225).abs() < 1e-12);
        assert!((c.gamma7.unwrap() - 2.0 / 9.0).abs() < 1e-12);
        assert!(c.beta6.unwrap().abs() < 1e-14);
        assert!((cf.h1 + 1.44).abs() < 1e-12 && (cf.h2 - 0.52).abs() < 1e-12);
        assert!((stability_margin(&p).unwrap() + 0.2376).abs() < 1e-12);
        assert!(cf.sigma < 0.0);
    }

    #[test]
    fn closed_forms_match_engine() {
        for p in sample_region(20, 3, DeltaBounds::default()).unwrap() {
            let a = analyze_at(&p.model().unwrap(), &hopf_point(&p).unwrap(), JetSource::Exact).unwrap();
            let r = closed_form_check(&a.coefficients, &closed_form_coefficients(&p).unwrap().coefficients);
            assert!(r.max_rel_error < 1e-6, "{p:?}: {r:?}");
        }
    }

    #[test]
    fn errors() {
        let mut p = interior();
        p.alpha2 = p.alpha1;
        assert!(matches!(hopf_point(&p), Err(Error::DegenerateAlphas)));
        p.alpha2 = 0.3;
        assert!(matches!(hopf_point(&p), Err(Error::NotAdmissible(_))));
        assert!(matches!(stability_margin(&p), Err(Error::NotAdmissible(_))));
        assert!(matches!(
            sample_region(3, 1, DeltaBounds { lo: 2.0, hi: 1.0 }),
            Err(Error::InvalidBounds(_))
        ));
        let mut q = interior();
        q.mu = 0.8;
        assert!(matches!(boundary_report(&q), Err(Error::NoCoexistencePossible(_))));
    }

    #[test]
    fn sampling_is_admissible_and_deterministic() {
        let a = sample_region(3, 42, DeltaBounds::default()).unwrap();
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|p| p.is_admissible() && p.ell1() > 0.0 && p.ell2() > 0.0));
        assert_eq!(a, sample_region(3, 42, DeltaBounds::default()).unwrap());
    }

    #[test]
    fn boundary() {
        let b = boundary_report(&interior()).unwrap();
        assert!((b.equilibria[2][0] - 0.35).abs() < 1e-15);
        assert!((b.hopf_indicators[0] + 0.2).abs() < 1e-15);
        assert!((b.hopf_indicators[1] - 0.2).abs() < 1e-15);
        assert_eq!(b.lyapunov_drift_sign, -1);
    }

    #[test]
    fn h_polynomials() {
        let l = 0.3;
        assert!((h1(l, 1.0 - 2.0 * l, 0.7) + 2.0 * (l + 0.7f64).powi(2)).abs() < 1e-14);
        for p in sample_region(200, 9, DeltaBounds::default()).unwrap() {
            assert_eq!(h2(p.lambda, p.alpha1, p.alpha2), -h1(p.lambda, p.alpha2, p.alpha1));
            assert!(h1(p.lambda, p.alpha1, p.alpha2) < 0.0 && h2(p.lambda, p.alpha1, p.alpha2) > 0.0);
        }
    }

    #[test]
    fn sweep_rows_are_es() {
        let rows = sweep(&sample_region(16, 7, DeltaBounds::default()).unwrap()).unwrap();
        assert!(rows.iter().all(|r| r.is_es() && r.margin < 0.0 && r.direction == 1));
        let t = sweep_table(&rows);
        assert_eq!(t.lines().count(), 17);
        assert!(t.lines().nth(1).unwrap().ends_with(",Type-ES"));
    }
}
