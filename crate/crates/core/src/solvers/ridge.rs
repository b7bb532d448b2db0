use ndarray::{Array1, ArrayView1, ArrayView2};

use super::gram::Gram;
use super::{fit_ols, LinearModel, Method, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, symmetric_eigen};
use crate::Float;

/// Closed-form ridge: solves `(X^T X + alpha I) w = X^T y` on centered data.
/// `alpha = 0` falls back to the minimum-norm least-squares solution.
pub fn fit_ridge<F: Float>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    alpha: F,
    opts: &SolverOptions<F>,
) -> Result<LinearModel<F>> {
    if !(alpha >= F::zero()) || !alpha.is_finite() {
        return Err(Error::InvalidConfig(format!("ridge alpha must be >= 0, got {alpha}")));
    }
    if alpha == F::zero() {
        let mut m = fit_ols(x, y, opts)?;
        m.method = Method::Ridge;
        return Ok(m);
    }
    let gram = Gram::new(x, y, opts.fit_intercept)?;
    let coefs = ridge_from_gram(&gram, alpha);
    Ok(LinearModel { intercept: gram.intercept_for(&coefs), coefs, method: Method::Ridge })
}

/// Ridge coefficients from precomputed sufficient statistics (`alpha > 0`).
pub fn ridge_from_gram<F: Float>(gram: &Gram<F>, alpha: F) -> Array1<F> {
    let mut a = gram.xtx.clone();
    a.diag_mut().mapv_inplace(|d| d + alpha);
    match cholesky(a.view()) {
        Some(l) => cholesky_solve(l.view(), gram.xty.view()),
        None => {
            // Only reachable through rounding on a numerically singular Gram.
            let (vals, vecs) = symmetric_eigen(a.view());
            let proj = vecs.t().dot(&gram.xty);
            let scaled = Array1::from_iter(
                proj.iter().zip(vals.iter()).map(|(&c, &l)| if l > F::zero() { c / l } else { F::zero() }),
            );
            vecs.dot(&scaled)
        }
    }
}
