use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::Float;

/// Sufficient statistics of a (centered) least-squares problem.
#[derive(Debug, Clone)]
pub struct Gram<F> {
    pub xtx: Array2<F>,
    pub xty: Array1<F>,
    pub yty: F,
    pub n: usize,
    pub x_mean: Array1<F>,
    pub y_mean: F,
}

impl<F: Float> Gram<F> {
    pub fn new(x: ArrayView2<F>, y: ArrayView1<F>, fit_intercept: bool) -> Result<Self> {
        let n = x.nrows();
        if n != y.len() {
            return Err(Error::DimensionMismatch(format!("x has {n} rows, y has {}", y.len())));
        }
        if n == 0 {
            return Err(Error::Empty("no observations".into()));
        }
        let (xc, yc, x_mean, y_mean) = center(x, y, fit_intercept);
        Ok(Gram {
            xtx: xc.t().dot(&xc),
            xty: xc.t().dot(&yc),
            yty: yc.dot(&yc),
            n,
            x_mean,
            y_mean,
        })
    }

    pub fn p(&self) -> usize {
        self.xty.len()
    }

    pub fn intercept_for(&self, coefs: &Array1<F>) -> F {
        self.y_mean - self.x_mean.dot(coefs)
    }

    /// `(1/n) max_j |x_j^T y|` on the centered data.
    pub fn alpha_max(&self) -> F {
        let n = F::from_count(self.n);
        self.xty.iter().fold(F::zero(), |m, &c| m.max(c.abs())) / n
    }
}

/// Column-centers `x` and centers `y` when `fit_intercept`; otherwise returns
/// copies with zero means.
pub(crate) fn center<F: Float>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    fit_intercept: bool,
) -> (Array2<F>, Array1<F>, Array1<F>, F) {
    let p = x.ncols();
    if !fit_intercept || x.nrows() == 0 {
        return (x.to_owned(), y.to_owned(), Array1::zeros(p), F::zero());
    }
    let x_mean = x.mean_axis(Axis(0)).expect("non-empty");
    let y_mean = y.mean().expect("non-empty");
    let xc = &x - &x_mean;
    let yc = y.mapv(|v| v - y_mean);
    (xc, yc, x_mean, y_mean)
}
