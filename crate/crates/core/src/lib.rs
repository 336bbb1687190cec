//! Detection, classification and numerical verification of hybrid Hopf
//! bifurcations: a pair of eigenvalues crossing the imaginary axis at a point
//! of a line of equilibria in R^3.

pub mod error;
pub mod frame;
pub mod models;
pub mod verify;
pub mod classifier;
pub mod coefficients;
pub mod eco;
pub mod cli;

pub use error::{Error, Result};
pub use models::{Model, ModelSpec, State};
