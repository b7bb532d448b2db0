//! Simulation workbench for comparing Ridge, Lasso, Elastic Net and
//! Post-Lasso OLS on synthetic feature spaces.
//!
//! The pipeline is: [`spacegen`] draws a covariance spectrum, basis, true
//! coefficients and a data set; [`solvers`] fits each method with
//! cross-validated penalties; [`metrics`] scores the fits; [`harness`] sweeps
//! a grid of configurations into an append-only store; [`analysis`] turns the
//! store into effect-size tables. [`errorcontrol`] holds stability selection
//! and the knockoff filter, and [`advisor`] maps observable diagnostics of a
//! real data set to a method recommendation.
//!
//! Numeric code is generic over [`Float`] (`f32` or `f64`); the aliases at
//! the bottom of this module fix it to `f64`.

pub mod advisor;
pub mod analysis;
pub mod error;
pub mod errorcontrol;
mod float;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod solvers;
pub mod spacegen;

pub use error::{Error, Result};
pub use float::Float;
pub use solvers::{CvMethod, CvPlan, Method, SolverOptions};
pub use spacegen::{BetaDist, Dispersion, Hyperparameter, SimConfig};

pub type LinearModel64 = solvers::LinearModel<f64>;
pub type FitReport64 = solvers::FitReport<f64>;
pub type Dataset64 = spacegen::Dataset<f64>;
pub type Gram64 = solvers::Gram<f64>;
pub type SolverOptions64 = SolverOptions<f64>;
