//! Regularized least-squares solvers and cross-validated hyperparameter
//! election.
//!
//! Objectives, with `n` the number of rows and all inputs centered:
//!
//! * OLS: `||Xw - y||^2`, minimum-norm solution when rank deficient.
//! * Ridge: `||Xw - y||^2 + alpha ||w||^2` (no `1/n` scaling).
//! * Lasso: `(1/2n) ||Xw - y||^2 + alpha ||w||_1`.
//! * Elastic net: `(1/2n) ||Xw - y||^2 + alpha rho ||w||_1 + alpha (1 - rho)/2 ||w||^2`.

mod alpha;
mod cd;
mod cv;
mod gram;
mod ols;
mod ridge;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, ArrayView2};
use serde::{Deserialize, Serialize};

pub use alpha::{compute_alpha_max, AlphaBounds, DEFAULT_ALPHA_EPS};
pub use cd::{coordinate_descent, fit_elasticnet, fit_lasso, kkt_residual, CdOutcome};
pub use cv::{
    cross_validate, fit_post_lasso, folds_for_sample_size, CvMethod, CvPlan, CvPoint, FitReport,
    PAPER_ALPHA_GRID, PAPER_L1_GRID,
};
pub use gram::Gram;
pub use ols::fit_ols;
pub use ridge::{fit_ridge, ridge_from_gram};

use crate::error::Error;
use crate::Float;

/// Fitting method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ols,
    Ridge,
    Lasso,
    ElasticNet,
    PostLassoOls,
}

impl Method {
    /// The four frameworks compared by the benchmark, in canonical order.
    pub const FRAMEWORKS: [Method; 4] =
        [Method::Lasso, Method::PostLassoOls, Method::ElasticNet, Method::Ridge];

    /// Whether support is read off exact zeros. Ridge and OLS keep every feature.
    pub fn is_sparse(self) -> bool {
        matches!(self, Method::Lasso | Method::ElasticNet | Method::PostLassoOls)
    }

    pub fn short(self) -> &'static str {
        match self {
            Method::Ols => "OLS",
            Method::Ridge => "R",
            Method::Lasso => "L",
            Method::ElasticNet => "EN",
            Method::PostLassoOls => "PL",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ols => "ols",
            Method::Ridge => "ridge",
            Method::Lasso => "lasso",
            Method::ElasticNet => "elastic_net",
            Method::PostLassoOls => "post_lasso_ols",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "ols" => Ok(Method::Ols),
            "ridge" | "r" => Ok(Method::Ridge),
            "lasso" | "l" => Ok(Method::Lasso),
            "elastic_net" | "elasticnet" | "enet" | "en" => Ok(Method::ElasticNet),
            "post_lasso_ols" | "post_lasso" | "postlasso" | "pl" => Ok(Method::PostLassoOls),
            other => Err(Error::Parse(format!("unknown method `{other}`"))),
        }
    }
}

/// Fitted affine model `x -> intercept + x . coefs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<F> {
    pub intercept: F,
    pub coefs: Array1<F>,
    pub method: Method,
}

impl<F: Float> LinearModel<F> {
    pub fn predict(&self, x: ArrayView2<F>) -> Array1<F> {
        x.dot(&self.coefs) + self.intercept
    }

    /// Indices of exactly non-zero coefficients.
    pub fn nonzero(&self) -> Vec<usize> {
        self.coefs.iter().enumerate().filter(|(_, &c)| c != F::zero()).map(|(j, _)| j).collect()
    }
}

/// Knobs shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<F> {
    /// Center `X` and `y` and recover an intercept afterwards.
    pub fit_intercept: bool,
    /// Coordinate descent stops once the largest coefficient change in a sweep
    /// is at most `tol * max(1, ||w||_inf)` ...
    pub tol: F,
    /// ... and the KKT residual is at most `kkt_tol * max(1, alpha_max)`.
    pub kkt_tol: F,
    pub max_sweeps: usize,
}

impl<F: Float> Default for SolverOptions<F> {
    fn default() -> Self {
        SolverOptions {
            fit_intercept: true,
            tol: F::cst(1e-6),
            kkt_tol: F::cst(1e-7),
            max_sweeps: 100_000,
        }
    }
}

impl<F: Float> SolverOptions<F> {
    pub fn without_intercept() -> Self {
        SolverOptions { fit_intercept: false, ..Self::default() }
    }
}
