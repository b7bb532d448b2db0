use ndarray::{ArrayView1, ArrayView2};

use super::gram::Gram;
use crate::error::{Error, Result};
use crate::Float;

/// Default ratio between the lower and upper end of a lasso path.
pub const DEFAULT_ALPHA_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBounds<F> {
    /// Smallest penalty at which every lasso coefficient is exactly zero.
    pub alpha_max: F,
    pub alpha_min: F,
    /// Set when `alpha_max` is zero (response orthogonal to every column).
    pub degenerate: bool,
}

/// `alpha_max = (1/n) ||X^T y||_inf` on the centered data, and
/// `alpha_min = alpha_max * eps`.
pub fn compute_alpha_max<F: Float>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    fit_intercept: bool,
    eps: F,
) -> Result<AlphaBounds<F>> {
    let gram = Gram::new(x, y, fit_intercept)?;
    if gram.xtx.diag().iter().all(|&d| d == F::zero()) {
        return Err(Error::UndefinedAlphaMax("design matrix is identically zero".into()));
    }
    let alpha_max = gram.alpha_max();
    Ok(AlphaBounds { alpha_max, alpha_min: alpha_max * eps, degenerate: alpha_max == F::zero() })
}
