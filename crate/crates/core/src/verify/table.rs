//! Delimited text tables.
//!
//! Branch table columns, in order:
//!
//! ```text
//! mu,period,amplitude,kappa1_re,kappa1_im,kappa2_re,kappa2_im,kappa3_re,kappa3_im,residual
//! ```
//!
//! `kappa1` is the trivial multiplier. Orbit sample files have columns
//! `t` followed by the model's three state names (`x1,x2,s` for the
//! predator-prey model, `x1,x2,x3` otherwise).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::continuation::Branch;
use super::shooting::PeriodicOrbit;
use crate::error::Result;
use crate::models::Model;

pub const BRANCH_COLUMNS: [&str; 10] = [
    "mu",
    "period",
    "amplitude",
    "kappa1_re",
    "kappa1_im",
    "kappa2_re",
    "kappa2_im",
    "kappa3_re",
    "kappa3_im",
    "residual",
];

pub fn state_names(model: &Model) -> [&'static str; 3] {
    if model.name == "predator_prey" {
        ["x1", "x2", "s"]
    } else {
        ["x1", "x2", "x3"]
    }
}

pub fn branch_table(branch: &Branch) -> String {
    let mut s = BRANCH_COLUMNS.join(",");
    s.push('\n');
    for p in &branch.points {
        let k = p.orbit.floquet;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            p.mu, p.period, p.amplitude, k[0][0], k[0][1], k[1][0], k[1][1], k[2][0], k[2][1], p.orbit.residual
        );
    }
    s
}

pub fn orbit_table(model: &Model, orbit: &PeriodicOrbit) -> String {
    let n = state_names(model);
    let mut s = format!("t,{},{},{}\n", n[0], n[1], n[2]);
    for (t, x) in &orbit.samples {
        let _ = writeln!(s, "{},{},{},{}", t, x[0], x[1], x[2]);
    }
    s
}

/// Writes `branch.csv` and one `orbit_<k>.csv` per branch point; returns the paths.
pub fn write_branch(dir: &Path, model: &Model, branch: &Branch) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    let path = dir.join("branch.csv");
    fs::write(&path, branch_table(branch))?;
    out.push(path);
    for (k, p) in branch.points.iter().enumerate() {
        let path = dir.join(format!("orbit_{k:03}.csv"));
        fs::write(&path, orbit_table(model, &p.orbit))?;
        out.push(path);
    }
    Ok(out)
}
