//! Command-line front end.
//!
//! ```text
//! hybrid-hopf <classify|verify|continue|eco-sweep|truncated> [--config PATH] [--out DIR]
//!             [--seed N] [--mu-grid a,b,...] [--samples N] [--tol X]
//! ```
//!
//! The run configuration is a TOML document; flags override its fields.
//!
//! ```toml
//! command = "continue"
//! mu_grid = [5e-4, 1e-3, 2e-3]
//! tol = 1e-11
//!
//! [model]
//! builtin = "predator_prey"
//! params = { delta1 = 1.0, delta2 = 1.0, lambda = 0.3, alpha1 = 0.2, alpha2 = 0.6 }
//! ```
//!
//! Exit status: 0 on a definite result, 1 when a branch or trajectory is
//! lost, 2 when an assumption fails, 3 for a degenerate stability
//! coefficient, 64 for configuration errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classifier::{analyze_at, classify, Analysis, BifurcationType};
use crate::coefficients::compute_coefficients;
use crate::eco::{self, DeltaBounds, EcoParams};
use crate::error::{Error, Result};
use crate::frame::{self, locate_hopf_point};
use crate::models::{JetSource, Model, ModelSpec, State};
use crate::verify::integrate::TOL_RANGE;
use crate::verify::{
    averaged_drift_check, compare_with_full, continue_branch_tol, find_periodic_orbit_tol, floquet_stability,
    log_grid, simulate_truncated, table, OrbitSeed, Truncation, ORBIT_TOL,
};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "HYBRID_HOPF_OUT";
pub const DEFAULT_OUT: &str = "hybrid-hopf-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_LOST: i32 = 1;
pub const EXIT_ASSUMPTION: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_CONFIG: i32 = 64;

pub const MAX_SAMPLES: usize = 1_000_000;
pub const MAX_GRID: usize = 200;
/// Largest `|mu|` accepted in a grid.
pub const MAX_MU: f64 = 1.0;
pub const DEFAULT_SAMPLES: usize = 1000;
/// Default continuation grid magnitudes; the sign follows the predicted direction.
pub const DEFAULT_GRID: (f64, f64, usize) = (5e-4, 2e-2, 8);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Verify,
    Continue,
    EcoSweep,
    Truncated,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JetChoice {
    #[default]
    Auto,
    Exact,
    FiniteDifference,
}

impl From<JetChoice> for JetSource {
    fn from(j: JetChoice) -> JetSource {
        match j {
            JetChoice::Auto => JetSource::Auto,
            JetChoice::Exact => JetSource::Exact,
            JetChoice::FiniteDifference => JetSource::FiniteDifference(Default::default()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncatedOptions {
    pub epsilon: f64,
    pub mu_tilde: f64,
    /// Initial `(r̃, z̃)`.
    pub x0: [f64; 2],
    /// Defaults to `10 / epsilon`.
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default = "first")]
    pub truncation: Truncation,
    #[serde(default = "yes")]
    pub compare_full: bool,
}

fn first() -> Truncation {
    Truncation::First
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    /// Starting point for the Hopf point search.
    #[serde(default)]
    pub hopf_seed: Option<State>,
    #[serde(default)]
    pub jets: JetChoice,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub mu_grid: Option<Vec<f64>>,
    /// Log-spaced grid; ignored when `mu_grid` is given.
    #[serde(default)]
    pub mu_range: Option<MuRange>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub delta_bounds: Option<[f64; 2]>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub truncated: Option<TruncatedOptions>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text)
    }
}

#[derive(Debug, Parser)]
#[command(name = "hybrid-hopf", version, about = "Hybrid Hopf bifurcations on lines of equilibria")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Integrator tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Suppress the report on stdout.
    #[arg(long, short)]
    pub quiet: bool,
}

/// Validated run settings.
#[derive(Clone, Debug)]
pub struct Settings {
    pub command: Command,
    pub config: RunConfig,
    pub out: PathBuf,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub delta_bounds: DeltaBounds,
    /// Explicit grid, if any; otherwise the default follows the direction.
    pub mu_grid: Option<Vec<f64>>,
    pub quiet: bool,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.len() > MAX_GRID {
        return Err(Error::Config(format!("mu grid needs 1 to {MAX_GRID} values")));
    }
    if grid.iter().any(|m| !m.is_finite() || *m == 0.0 || m.abs() > MAX_MU) {
        return Err(Error::Config(format!("mu values must be nonzero with |mu| <= {MAX_MU}")));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::Config("mu grid must be strictly monotone".into()));
    }
    Ok(())
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Settings> {
        let config = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(c) = config.command {
            if c != cli.command {
                return Err(Error::Config(format!("config is for {c:?}, command line asks for {:?}", cli.command)));
            }
        }
        let out = cli
            .out
            .clone()
            .or_else(|| config.out.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let tol = cli.tol.or(config.tol).unwrap_or(ORBIT_TOL);
        if !(tol >= TOL_RANGE.0 && tol <= TOL_RANGE.1) {
            return Err(Error::Config(format!("tol {tol} outside [{:e}, {:e}]", TOL_RANGE.0, TOL_RANGE.1)));
        }
        let samples = cli.samples.or(config.samples).unwrap_or(DEFAULT_SAMPLES);
        if !(1..=MAX_SAMPLES).contains(&samples) {
            return Err(Error::Config(format!("samples must be in [1, {MAX_SAMPLES}]")));
        }
        let seed = cli.seed.or(config.seed).unwrap_or(0);
        let delta_bounds = match config.delta_bounds {
            Some([lo, hi]) => DeltaBounds { lo, hi },
            None => DeltaBounds::default(),
        };
        delta_bounds.validate().map_err(|e| Error::Config(e.to_string()))?;
        let mu_grid = match (&cli.mu_grid, &config.mu_grid, &config.mu_range) {
            (Some(g), _, _) | (None, Some(g), _) => Some(g.clone()),
            (None, None, Some(r)) => {
                if r.count == 0 || r.lo * r.hi <= 0.0 {
                    return Err(Error::Config("mu_range needs count >= 1 and lo, hi of one sign".into()));
                }
                Some(log_grid(r.lo, r.hi, r.count))
            }
            (None, None, None) => None,
        };
        if let Some(g) = &mu_grid {
            check_grid(g)?;
        }
        let needs_model = cli.command != Command::EcoSweep;
        if needs_model && config.model.is_none() {
            return Err(Error::Config("this command needs a [model] section in --config".into()));
        }
        if cli.command == Command::Truncated {
            match &config.truncated {
                Some(t) if t.epsilon > 0.0 && t.epsilon <= 0.5 => {}
                Some(t) => return Err(Error::Config(format!("epsilon {} outside (0, 0.5]", t.epsilon))),
                None => return Err(Error::Config("truncated needs a [truncated] section".into())),
            }
        }
        Ok(Settings { command: cli.command, config, out, tol, samples, seed, delta_bounds, mu_grid, quiet: cli.quiet })
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::UnknownModel(_)
        | Error::InvalidParams(_)
        | Error::InvalidBounds(_)
        | Error::NotAdmissible(_)
        | Error::DegenerateAlphas
        | Error::Io(_) => EXIT_CONFIG,
        Error::AssumptionViolation(_)
        | Error::NotHopf(_)
        | Error::DefectiveSpectrum(_)
        | Error::SymmetryDefect { .. }
        | Error::MissingJetEntry(_) => EXIT_ASSUMPTION,
        _ => EXIT_LOST,
    }
}

struct Out<'a> {
    dir: &'a Path,
    quiet: bool,
}

impl Out<'_> {
    fn file(&self, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(self.dir)?;
        fs::write(self.dir.join(name), contents)?;
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        self.file(name, &s)
    }

    fn say(&self, text: &str) {
        if !self.quiet {
            println!("{text}");
        }
    }
}

/// Predator-prey parameters outside the admissible region are rejected here.
fn default_seed(model: &Model, config: &RunConfig) -> Result<State> {
    if let Some(s) = config.hopf_seed {
        return Ok(s);
    }
    if model.name == "predator_prey" {
        let p = |k: &str| model.param(k).unwrap_or(f64::NAN);
        let e = EcoParams::new(p("delta1"), p("delta2"), p("lambda"), p("alpha1"), p("alpha2"));
        return eco::hopf_point(&e);
    }
    Ok([0.0; 3])
}

/// Classification stage shared by every model command. Writes the assumption
/// report, and the coefficient and classification documents when they exist.
/// Returns the analysis, or the exit status to stop with.
fn classify_stage(s: &Settings, out: &Out) -> Result<std::result::Result<Analysis, i32>> {
    let model = s.config.model.as_ref().expect("validated").build()?;
    let source: JetSource = s.config.jets.into();
    let x_h = locate_hopf_point(&model, &default_seed(&model, &s.config)?)?;
    let a = frame::analyze(&model, &x_h, &model.frame_normalization(), source);
    out.json("assumptions.json", &a.report)?;
    out.say(&a.report.table());
    let failed = a.report.verdicts.failed();
    if !failed.is_empty() {
        eprintln!("assumption violated: {} failed", failed.join(", "));
        return Ok(Err(EXIT_ASSUMPTION));
    }
    let sj = a.standard_jet.ok_or_else(|| Error::AssumptionViolation("no standard frame".into()))?;
    let coeffs = compute_coefficients(&sj)?;
    out.json("coefficients.json", &coeffs)?;
    let c = match classify(&coeffs) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return Ok(Err(exit_code(&e)));
        }
    };
    out.json("classification.json", &c)?;
    out.say(&c.summary());
    if c.kind == BifurcationType::Degenerate {
        eprintln!("stability coefficient {:e} is zero within {:e}", c.sigma, c.sigma_tol);
        return Ok(Err(EXIT_DEGENERATE));
    }
    Ok(Ok(analyze_at(&model, &x_h, source)?))
}

fn default_grid(a: &Analysis) -> Vec<f64> {
    let d = a.classification.direction as f64;
    log_grid(d * DEFAULT_GRID.0, d * DEFAULT_GRID.1, DEFAULT_GRID.2)
}

pub fn run_classify(s: &Settings) -> Result<i32> {
    let out = Out { dir: &s.out, quiet: s.quiet };
    Ok(match classify_stage(s, &out)? {
        Ok(_) => EXIT_OK,
        Err(code) => code,
    })
}

#[derive(Clone, Debug, Serialize)]
struct VerifyReport {
    mu: f64,
    predicted_period: f64,
    predicted_radius: f64,
    period: f64,
    residual: f64,
    floquet: [[f64; 2]; 3],
    stable: bool,
    unstable_dimension: usize,
    liouville_defect: f64,
    drift: crate::verify::DriftReport,
    /// Floquet verdict agrees with the predicted type.
    consistent: bool,
}

/// Solves for the orbit at one parameter value (the first grid entry) and
/// checks its multipliers against the classification.
pub fn run_verify(s: &Settings) -> Result<i32> {
    let out = Out { dir: &s.out, quiet: s.quiet };
    let a = match classify_stage(s, &out)? {
        Ok(a) => a,
        Err(code) => return Ok(code),
    };
    let mu = s.mu_grid.as_ref().map(|g| g[0]).unwrap_or_else(|| default_grid(&a)[3]);
    let p = match a.predict(mu) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return Ok(exit_code(&e));
        }
    };
    let orbit = match find_periodic_orbit_tol(&a.model, mu, &OrbitSeed::from(&p), s.tol) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("no periodic orbit at mu = {mu}: {e}");
            return Ok(EXIT_LOST);
        }
    };
    let v = floquet_stability(&orbit);
    let drift = averaged_drift_check(&a.model, &a.frame, Some(&a.coefficients), mu, p.r0)?;
    let expect_stable = a.classification.kind == BifurcationType::ES;
    let report = VerifyReport {
        mu,
        predicted_period: p.period,
        predicted_radius: p.r0,
        period: orbit.period,
        residual: orbit.residual,
        floquet: orbit.floquet,
        stable: v.stable,
        unstable_dimension: v.unstable_dimension,
        liouville_defect: orbit.liouville_defect(),
        drift,
        consistent: v.stable == expect_stable,
    };
    out.json("verify.json", &report)?;
    out.file("orbit.csv", &table::orbit_table(&a.model, &orbit))?;
    out.say(&format!(
        "orbit at mu = {mu}: period {:.10} (predicted {:.10}), |kappa| = {:.8}, {:.8}, {}",
        orbit.period,
        p.period,
        v.nontrivial_moduli[0],
        v.nontrivial_moduli[1],
        if v.stable { "stable" } else { "unstable" }
    ));
    if !report.consistent {
        eprintln!("Floquet verdict disagrees with {}", a.classification.kind);
        return Ok(EXIT_LOST);
    }
    Ok(EXIT_OK)
}

pub fn run_continue(s: &Settings) -> Result<i32> {
    let out = Out { dir: &s.out, quiet: s.quiet };
    let a = match classify_stage(s, &out)? {
        Ok(a) => a,
        Err(code) => return Ok(code),
    };
    let grid = s.mu_grid.clone().unwrap_or_else(|| default_grid(&a));
    let branch = continue_branch_tol(&a, &grid, s.tol)?;
    table::write_branch(&s.out, &a.model, &branch)?;
    let mut summary = format!("points: {} of {}\n", branch.points.len(), grid.len());
    match &branch.fit {
        Some(f) => {
            let _ = writeln!(summary, "fit: amplitude = {:.6e} |mu|^{:.6} over {} points", f.constant, f.exponent, f.points);
        }
        None => summary.push_str("fit: skipped, fewer than two points\n"),
    }
    if let Some(l) = &branch.lost {
        let _ = writeln!(summary, "lost at mu = {}: {}", l.mu, l.reason);
    }
    out.file("branch_summary.txt", &summary)?;
    out.say(summary.trim_end());
    Ok(match branch.complete() {
        Ok(()) => EXIT_OK,
        Err(_) => EXIT_LOST,
    })
}

pub fn run_eco_sweep(s: &Settings) -> Result<i32> {
    let out = Out { dir: &s.out, quiet: s.quiet };
    let samples = eco::sample_region(s.samples, s.seed, s.delta_bounds)?;
    let rows = eco::sweep(&samples)?;
    out.file("sweep.csv", &eco::sweep_table(&rows))?;
    let non_es = rows.iter().filter(|r| !r.is_es()).count();
    let positive = rows.iter().filter(|r| !(r.margin < 0.0)).count();
    let summary = format!("rows: {}, non-ES: {}, nonnegative margin: {}\n", rows.len(), non_es, positive);
    out.file("sweep_summary.txt", &summary)?;
    out.say(summary.trim_end());
    Ok(EXIT_OK)
}

pub fn run_truncated(s: &Settings) -> Result<i32> {
    let out = Out { dir: &s.out, quiet: s.quiet };
    let a = match classify_stage(s, &out)? {
        Ok(a) => a,
        Err(code) => return Ok(code),
    };
    let t = s.config.truncated.as_ref().expect("validated");
    let horizon = t.horizon.unwrap_or(10.0 / t.epsilon);
    let mut run = match simulate_truncated(&a.coefficients, t.epsilon, t.mu_tilde, t.x0, horizon, t.truncation) {
        Ok(r) => r,
        Err(Error::LeftDomain { tau }) => {
            eprintln!("truncated trajectory left |z| < r < 1 at tau = {tau}");
            return Ok(EXIT_LOST);
        }
        Err(e) => return Err(e),
    };
    if t.compare_full {
        compare_with_full(&mut run, &a.model, &a.frame)?;
    }
    let mut csv = String::from("tau,r,z\n");
    for p in &run.trajectory {
        let _ = writeln!(csv, "{},{},{}", p[0], p[1], p[2]);
    }
    out.file("truncated.csv", &csv)?;
    out.json("truncated.json", &run)?;
    let mut line = format!("truncated run: {} steps to tau = {}", run.trajectory.len(), run.horizon());
    if let Some(d) = run.full_deviation {
        let _ = write!(line, ", deviation from full model {d:.6e}");
    }
    out.say(&line);
    Ok(EXIT_OK)
}

pub fn run(cli: &Cli) -> i32 {
    let settings = match Settings::resolve(cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let result = match settings.command {
        Command::Classify => run_classify(&settings),
        Command::Verify => run_verify(&settings),
        Command::Continue => run_continue(&settings),
        Command::EcoSweep => run_eco_sweep(&settings),
        Command::Truncated => run_truncated(&settings),
    };
    result.unwrap_or_else(|e| {
        eprintln!("{e}");
        exit_code(&e)
    })
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}
