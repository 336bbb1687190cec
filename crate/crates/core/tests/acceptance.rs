//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL ...` line straight to stderr so the lines survive
//! output capture, then asserts.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use hybrid_hopf::classifier::{analyze_at, analyze_model, classify, BifurcationType};
use hybrid_hopf::coefficients::{closed_form_check, compute_coefficients};
use hybrid_hopf::eco::{self, DeltaBounds, EcoParams};
use hybrid_hopf::models::builtin::{ClassicalHopf, SyntheticNormalForm, ToyCylindrical};
use hybrid_hopf::models::{FdConfig, JetSource};
use hybrid_hopf::verify::{
    compare_with_full, continue_branch, find_periodic_orbit, floquet_stability, log_grid, simulate_truncated,
    OrbitSeed, Truncation,
};
use hybrid_hopf::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, pass: bool, detail: String) {
    let line = format!("criterion {n:>2}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {n}: {detail}");
}

fn interior() -> EcoParams {
    EcoParams::new(1.0, 1.0, 0.3, 0.2, 0.6)
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

#[test]
fn criterion_01_engine_matches_closed_forms() {
    let start = Instant::now();
    let samples = eco::sample_region(100, 1, DeltaBounds::default()).unwrap();
    let (mut exact, mut fd) = (0.0f64, 0.0f64);
    for p in &samples {
        let reference = eco::closed_form_coefficients(p).unwrap().coefficients.without(&["beta3"]);
        let model = p.model().unwrap();
        let x_h = eco::hopf_point(p).unwrap();
        let a = analyze_at(&model, &x_h, JetSource::Exact).unwrap();
        exact = exact.max(closed_form_check(&a.coefficients, &reference).max_rel_error);
        let b = analyze_at(&model, &x_h, JetSource::FiniteDifference(FdConfig::default())).unwrap();
        fd = fd.max(closed_form_check(&b.coefficients, &reference).max_rel_error);
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        exact < 1e-6 && fd < 1e-4 && secs < 30.0,
        format!("100 samples, max rel. error exact {exact:.2e} (< 1e-6), finite differences {fd:.2e} (< 1e-4), {secs:.1} s"),
    );
}

#[test]
fn criterion_02_synthetic_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let draw = |rng: &mut ChaCha8Rng| {
        let m: f64 = rng.gen_range(0.2..3.0);
        if rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    };
    let (mut worst, mut gamma3_worst, mut mismatches) = (0.0f64, 0.0f64, 0);
    for _ in 0..200 {
        let (a, b, c, d) = (draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let omega = rng.gen_range(0.3..3.0);
        let m = SyntheticNormalForm { a, b, c, d, omega }.model().unwrap();
        let an = analyze_at(&m, &[0.0; 3], JetSource::Exact).unwrap();
        let k = &an.coefficients;
        let expected = [
            (k.beta2, a),
            (k.beta5, b),
            (k.gamma5, c),
            (k.gamma7, d),
            (k.beta1, 0.0),
            (k.beta3, 0.0),
            (k.beta4, 0.0),
            (k.beta6, 0.0),
            (k.gamma1.max_abs(), 0.0),
            (k.gamma2.max_abs(), 0.0),
            (k.gamma4.max_abs(), 0.0),
            (k.gamma6.max_abs(), 0.0),
            (k.gamma3.c_cos1.abs() + k.gamma3.c_sin1.abs() + k.gamma3.c_cos2.abs() + k.gamma3.c_sin2.abs(), 0.0),
        ];
        worst = expected.iter().fold(worst, |w, (got, want)| w.max((got - want).abs()));
        // the constant of gamma3 carries the transcribed pi term
        gamma3_worst = gamma3_worst.max((k.gamma3.c0 - PI * a * c / omega).abs());
        let cl = an.classification;
        let sigma = -b * c * d;
        let kind = if a * b > 0.0 {
            BifurcationType::H
        } else if sigma < 0.0 {
            BifurcationType::ES
        } else {
            BifurcationType::EU
        };
        if cl.xi != sign(a * b)
            || cl.direction != -sign(b * c)
            || cl.kind != kind
            || (cl.sigma - sigma).abs() > 1e-10 * sigma.abs().max(1.0)
        {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        2,
        worst < 1e-10 && gamma3_worst < 1e-10 && mismatches == 0 && secs < 10.0,
        format!(
            "200 tuples, max coefficient error {worst:.1e}, gamma3 mean vs pi*a*c/omega {gamma3_worst:.1e}, \
             {mismatches} classification mismatches, {secs:.2} s"
        ),
    );
}

fn region_sweep() -> (Vec<EcoParams>, Vec<eco::SweepRow>, f64) {
    let start = Instant::now();
    let samples = eco::sample_region(1000, 7, DeltaBounds::default()).unwrap();
    let rows = eco::sweep(&samples).unwrap();
    (samples, rows, start.elapsed().as_secs_f64())
}

#[test]
fn criterion_03_elliptic_everywhere() {
    let (_, rows, secs) = region_sweep();
    let bad = rows.iter().filter(|r| !(r.beta2 < 0.0 && r.beta5 > 0.0)).count();
    report(3, bad == 0 && rows.len() == 1000 && secs < 10.0, format!("{} samples, {bad} with xi != -1, {secs:.2} s", rows.len()));
}

#[test]
fn criterion_04_stable_everywhere() {
    let (samples, rows, secs) = region_sweep();
    let bad_rows = rows.iter().filter(|r| !(r.sigma < 0.0 && r.margin < 0.0 && r.direction == 1 && r.is_es())).count();
    let mut bad_h = 0;
    let mut identity = 0;
    for p in &samples {
        let (h1, h2) = (eco::h1(p.lambda, p.alpha1, p.alpha2), eco::h2(p.lambda, p.alpha1, p.alpha2));
        if !(h1 < 0.0 && h2 > 0.0) {
            bad_h += 1;
        }
        if h2 != -eco::h1(p.lambda, p.alpha2, p.alpha1) {
            identity += 1;
        }
    }
    report(
        4,
        bad_rows == 0 && bad_h == 0 && identity == 0 && secs < 10.0,
        format!(
            "{} samples: {bad_rows} without (sigma < 0, margin < 0, direction +1), {bad_h} with H1 >= 0 or H2 <= 0, \
             {identity} mirror-identity failures, {secs:.2} s",
            samples.len()
        ),
    );
}

fn interior_branch() -> (hybrid_hopf::classifier::Analysis, hybrid_hopf::verify::Branch, f64) {
    let start = Instant::now();
    let p = interior();
    let a = analyze_at(&p.model().unwrap(), &eco::hopf_point(&p).unwrap(), JetSource::Exact).unwrap();
    let b = continue_branch(&a, &log_grid(5e-4, 2e-2, 8)).unwrap();
    (a, b, start.elapsed().as_secs_f64())
}

#[test]
fn criterion_05_orbit_scaling() {
    let (_, b, secs) = interior_branch();
    let full = b.lost.is_none() && b.points.len() == 8;
    let exponent = b.fit.map(|f| f.exponent).unwrap_or(f64::NAN);
    let t0 = 2.0 * PI / 0.3f64.sqrt();
    let period_err = b.points.first().map(|p| (p.period / t0 - 1.0).abs()).unwrap_or(f64::NAN);
    report(
        5,
        full && (exponent - 0.5).abs() <= 0.05 && period_err < 0.01 && secs < 120.0,
        format!(
            "{} of 8 points, exponent {exponent:.4}, period error at smallest mu {:.3}%, {secs:.1} s",
            b.points.len(),
            100.0 * period_err
        ),
    );
}

#[test]
fn criterion_06_floquet_stability() {
    let (_, b, _) = interior_branch();
    let mut worst_modulus = 0.0f64;
    let mut worst_trivial = 0.0f64;
    let mut worst_liouville = 0.0f64;
    let mut all_stable = !b.points.is_empty();
    for p in &b.points {
        let v = floquet_stability(&p.orbit);
        all_stable &= v.stable;
        worst_modulus = worst_modulus.max(v.nontrivial_moduli[0]).max(v.nontrivial_moduli[1]);
        worst_trivial = worst_trivial.max(v.trivial_defect);
        worst_liouville = worst_liouville.max(p.orbit.liouville_defect());
    }
    report(
        6,
        all_stable && worst_trivial < 1e-3 && worst_liouville < 1e-6,
        format!(
            "{} orbits, largest nontrivial |kappa| {worst_modulus:.6}, trivial defect {worst_trivial:.1e}, \
             Liouville defect {worst_liouville:.1e}",
            b.points.len()
        ),
    );
}

#[test]
fn criterion_07_no_orbits_in_wrong_direction() {
    let p = interior();
    let x_h = eco::hopf_point(&p).unwrap();
    let model = p.model().unwrap();
    let a = analyze_at(&model, &x_h, JetSource::Exact).unwrap();
    let r0 = a.predict(0.005).unwrap().r0;
    let t0 = 2.0 * PI / a.coefficients.omega;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut found = Vec::new();
    for _ in 0..20 {
        // uniform in the ball of radius 2 r0, in frame coordinates
        let w = loop {
            let v = nalgebra::Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if v.norm() <= 1.0 && v.norm() > 0.05 {
                break v * (2.0 * r0);
            }
        };
        let seed = OrbitSeed { state: a.frame.from_frame(&w, 0.0), period: t0 };
        if let Ok(o) = find_periodic_orbit(&model, -0.005, &seed) {
            if o.period > 0.5 * t0 && o.period < 2.0 * t0 {
                found.push(o.period);
            }
        }
    }
    report(7, found.is_empty(), format!("20 seeds within 2 r0 = {:.4} at mu = -0.005, orbits found: {found:?}", 2.0 * r0));
}

#[test]
fn criterion_08_classical_hopf_rejected() {
    let m = ClassicalHopf { sign: -1.0, omega: 1.0 }.model().unwrap();
    let r = analyze_model(&m, &[0.0; 3], JetSource::Exact);
    let pass = matches!(&r, Err(Error::AssumptionViolation(msg)) if msg.starts_with("A4 failed"));
    let detail = match &r {
        Err(e) => e.to_string().lines().next().unwrap_or_default().to_string(),
        Ok(a) => format!("classified as {}", a.classification.kind),
    };
    report(8, pass, detail);
}

#[test]
fn criterion_09_degenerate_flag() {
    let toy = ToyCylindrical {
        omega: 1.3,
        beta2: -1.0,
        beta3: 0.0,
        beta4: 0.4,
        beta5: 2.0,
        beta6: 0.0,
        gamma3: 0.0,
        gamma5: -0.7,
        gamma7: 0.0,
    };
    let a = analyze_at(&toy.model().unwrap(), &[0.0; 3], JetSource::Exact).unwrap();
    let s = analyze_at(
        &SyntheticNormalForm { a: -1.0, b: 1.0, c: 1.0, d: 0.0, omega: 1.0 }.model().unwrap(),
        &[0.0; 3],
        JetSource::Exact,
    )
    .unwrap();
    let kinds = [a.classification.kind, s.classification.kind];
    report(9, kinds.iter().all(|k| *k == BifurcationType::Degenerate), format!("toy and synthetic instances classified {kinds:?}"));
}

#[test]
fn criterion_10_frame_invariance() {
    let p = interior();
    let a = analyze_at(&p.model().unwrap(), &eco::hopf_point(&p).unwrap(), JetSource::Exact).unwrap();
    let k0 = a.classification;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut changed = 0;
    for _ in 0..50 {
        let theta = rng.gen_range(0.0..2.0 * PI);
        let plane = rng.gen_range(0.2..5.0);
        let line = rng.gen_range(0.2..5.0);
        let g = a.frame.perturbed(&a.jet, theta, plane, line).unwrap();
        let k = classify(&compute_coefficients(&g.standard_jet(&a.jet).unwrap()).unwrap()).unwrap();
        if k.xi != k0.xi || k.direction != k0.direction || (k.sigma < 0.0) != (k0.sigma < 0.0) {
            changed += 1;
        }
    }
    report(10, changed == 0, format!("50 perturbed frames, {changed} changed xi, direction or sign(sigma)"));
}

#[test]
fn criterion_11_averaging_consistency() {
    let m = SyntheticNormalForm { a: -1.0, b: 1.0, c: -1.0, d: 1.0, omega: 1.0 }.model().unwrap();
    let a = analyze_at(&m, &[0.0; 3], JetSource::Exact).unwrap();
    let mut devs = Vec::new();
    for eps in [0.1, 0.05] {
        let mut run = simulate_truncated(&a.coefficients, eps, 0.25, [0.6, 0.0], 10.0 / eps, Truncation::First).unwrap();
        devs.push(compare_with_full(&mut run, &a.model, &a.frame).unwrap());
    }
    let ratio = devs[0] / devs[1];
    report(
        11,
        (1.5..=3.0).contains(&ratio),
        format!("deviation {:.3e} at eps 0.1, {:.3e} at eps 0.05, ratio {ratio:.3} (first-order truncation)", devs[0], devs[1]),
    );
}

/// The reference parameter set has `2 lambda + alpha2 - 1 = 0`, on the edge
/// of the admissible region where `beta5` vanishes. The run uses the nearest
/// admissible variant with `alpha2` raised to 0.25 and checks the qualitative
/// picture only.
#[test]
fn criterion_12_boundary_branch_best_effort() {
    let reference = EcoParams::new(0.8, 0.5, 0.4, 0.1, 0.2);
    let reference_rejected = matches!(eco::hopf_point(&reference), Err(Error::NotAdmissible(_)));
    let p = EcoParams { alpha2: 0.25, ..reference };
    let a = analyze_at(&p.model().unwrap(), &eco::hopf_point(&p).unwrap(), JetSource::Exact).unwrap();
    let b = continue_branch(&a, &log_grid(1e-3, 0.05, 24)).unwrap();
    let amps: Vec<f64> = b.points.iter().map(|q| q.amplitude).collect();
    let mean_x2: Vec<f64> = b
        .points
        .iter()
        .map(|q| q.orbit.samples.iter().map(|(_, x)| x[1]).sum::<f64>() / q.orbit.samples.len() as f64)
        .collect();
    let min_x2 = b
        .points
        .last()
        .map(|q| q.orbit.samples.iter().map(|(_, x)| x[1]).fold(f64::INFINITY, f64::min))
        .unwrap_or(f64::NAN);
    let monotone = amps.windows(2).all(|w| w[1] > w[0]);
    let toward_small_x2 = mean_x2.windows(2).all(|w| w[1] < w[0]);
    let last_mu = b.points.last().map(|q| q.mu).unwrap_or(0.0);
    let ended = match &b.lost {
        Some(l) if min_x2 < 0.05 => format!("stops at mu = {:.4} with the orbit near the x2 = 0 face (min x2 {min_x2:.4})", l.mu),
        Some(l) => format!("lost at mu = {:.4}: {}", l.mu, l.reason),
        None => "covers the whole grid".into(),
    };
    report(
        12,
        reference_rejected && b.points.len() >= 8 && monotone && toward_small_x2,
        format!(
            "best effort with alpha2 = 0.25 (reference set not admissible: {reference_rejected}); {} points up to mu = {last_mu:.4}, \
             amplitude monotone: {monotone}, mean x2 decreasing: {toward_small_x2}, {ended}",
            b.points.len()
        ),
    );
}
