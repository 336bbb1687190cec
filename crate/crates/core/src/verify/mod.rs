//! Independent numerical checks: time integration, periodic orbits, Floquet
//! multipliers, continuation in the parameter, and averaging comparisons.

pub mod averaging;
pub mod continuation;
pub mod integrate;
pub mod shooting;
pub mod table;

pub use averaging::{
    averaged_drift_check, compare_with_full, first_order_linearization, simulate_truncated, DriftReport,
    TruncatedRun, Truncation,
};
pub use continuation::{continue_branch, continue_branch_tol, fit_scaling, log_grid, Branch, BranchPoint, ScalingFit};
pub use integrate::{integrate, integrate_variational, Trajectory, ORBIT_TOL, SWEEP_TOL};
pub use shooting::{find_periodic_orbit, find_periodic_orbit_tol, floquet_stability, OrbitSeed, PeriodicOrbit, StabilityVerdict};
