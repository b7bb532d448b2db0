use ndarray::{ArrayView1, ArrayView2};

use super::gram::center;
use super::{LinearModel, Method, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::Float;

/// Least squares via the SVD pseudoinverse; rank-deficient designs get the
/// minimum-norm solution.
pub fn fit_ols<F: Float>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    opts: &SolverOptions<F>,
) -> Result<LinearModel<F>> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows, y has {}",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() == 0 {
        return Err(Error::Empty("ols needs at least one observation".into()));
    }
    let (xc, yc, x_mean, y_mean) = center(x, y, opts.fit_intercept);
    let coefs = if x.ncols() == 0 { ndarray::Array1::zeros(0) } else { svd(xc.view()).solve_pinv(yc.view()) };
    let intercept = y_mean - x_mean.dot(&coefs);
    Ok(LinearModel { intercept, coefs, method: Method::Ols })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn identity_design_returns_response() {
        let x = Array2::<f64>::eye(3);
        let y = array![1.0, 2.0, 3.0];
        let m = fit_ols(x.view(), y.view(), &SolverOptions::without_intercept()).unwrap();
        for (a, b) in m.coefs.iter().zip(y.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(m.intercept, 0.0);
    }

    #[test]
    fn exact_fit_has_zero_residuals() {
        let x: ndarray::Array2<f64> = array![[1.0, 0.5], [2.0, -1.0], [0.3, 4.0], [1.5, 1.5], [-2.0, 0.1]];
        let w = array![2.0, -3.0];
        let y = x.dot(&w) + 0.7;
        let m = fit_ols(x.view(), y.view(), &SolverOptions::default()).unwrap();
        let resid = &m.predict(x.view()) - &y;
        assert!(resid.iter().all(|r| r.abs() < 1e-10));
        assert!((m.intercept - 0.7).abs() < 1e-10);
    }

    #[test]
    fn no_features_gives_mean() {
        let x = Array2::<f64>::zeros((4, 0));
        let y = array![1.0, 2.0, 3.0, 6.0];
        let m = fit_ols(x.view(), y.view(), &SolverOptions::default()).unwrap();
        assert_eq!(m.intercept, 3.0);
    }
}
