use ndarray::{concatenate, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::solvers::{cross_validate, CvMethod, CvPlan, SolverOptions};
use crate::spacegen::CovarianceModel;
use crate::Float;

/// Equicorrelated model-X knockoffs for rows drawn from `N(0, sigma)` with a
/// known covariance. Requires a full-rank `sigma`; the common diagonal shift
/// is `s = min(2 * lambda_min, 1)`.
pub fn construct_gaussian_knockoffs<R: Rng + ?Sized>(
    x: ArrayView2<f64>,
    cov: &CovarianceModel,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let p = cov.dim();
    if x.ncols() != p {
        return Err(Error::DimensionMismatch(format!(
            "x has {} columns, covariance is {p} x {p}",
            x.ncols()
        )));
    }
    let precision = cov.precision().ok_or_else(|| {
        Error::KnockoffsUnsupported(format!(
            "covariance has rank {} < {p}; Gaussian knockoffs need a full-rank design",
            cov.spectrum.rank
        ))
    })?;
    let lambda_min = cov
        .spectrum
        .min_positive()
        .ok_or_else(|| Error::KnockoffsUnsupported("empty spectrum".into()))?;
    let s = (2.0 * lambda_min).min(1.0);
    gaussian_knockoffs(x, cov.sigma().view(), precision.view(), s, rng)
}

/// Samples `X~ | X ~ N(X - X sigma^-1 D, 2D - D sigma^-1 D)` row by row with
/// `D = s * I`, given the precision matrix of `sigma`.
pub fn gaussian_knockoffs<R: Rng + ?Sized>(
    x: ArrayView2<f64>,
    sigma: ArrayView2<f64>,
    precision: ArrayView2<f64>,
    s: f64,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let (n, p) = x.dim();
    if sigma.dim() != (p, p) || precision.dim() != (p, p) {
        return Err(Error::DimensionMismatch("sigma and precision must be p x p".into()));
    }
    if !(s > 0.0) {
        return Err(Error::KnockoffsUnsupported(format!("diagonal shift {s} must be > 0")));
    }
    // V = 2D - D P D with D = sI.
    let mut v = precision.mapv(|e| -s * s * e);
    for j in 0..p {
        v[[j, j]] += 2.0 * s;
    }
    let v = (&v + &v.t()) * 0.5;
    let (vals, vecs) = symmetric_eigen(v.view());
    let mut l = vecs;
    for (mut col, &lam) in l.columns_mut().into_iter().zip(vals.iter()) {
        let r = lam.max(0.0).sqrt();
        col.mapv_inplace(|e| e * r);
    }

    let shrink = precision.mapv(|e| -s * e) + Array2::<f64>::eye(p);
    let z = Array2::from_shape_simple_fn((n, p), || rng.sample::<f64, _>(StandardNormal));
    Ok(x.dot(&shrink) + z.dot(&l.t()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnockoffResult {
    pub w_stats: Vec<f64>,
    /// `f64::INFINITY` when no candidate threshold reaches the target.
    pub tau: f64,
    pub selected: Vec<usize>,
    pub q: f64,
    pub elected_alpha: f64,
    /// The augmented Lasso fit set every coefficient to zero.
    pub saturated: bool,
}

/// `W_j = |b_j| - |b_{j+p}|` for coefficients of the augmented design.
pub fn lasso_coefficient_difference(coefs: &[f64], p: usize) -> Vec<f64> {
    (0..p).map(|j| coefs[j].abs() - coefs[j + p].abs()).collect()
}

/// Knockoff+ threshold: the smallest `t` among the distinct positive `|W_j|`
/// with `(1 + #{W_j <= -t}) / #{W_j >= t} <= q`, or infinity if none.
pub fn knockoff_threshold(w: &[f64], q: f64) -> f64 {
    let mut candidates: Vec<f64> = w.iter().map(|v| v.abs()).filter(|&t| t > 0.0).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    for t in candidates {
        let negatives = w.iter().filter(|&&v| v <= -t).count();
        let positives = w.iter().filter(|&&v| v >= t).count();
        if positives > 0 && (1 + negatives) as f64 <= q * positives as f64 {
            return t;
        }
    }
    f64::INFINITY
}

/// Knockoff filter with Lasso coefficient-difference statistics. The Lasso
/// on `[X, X~]` is fit once at the cross-validated penalty.
pub fn knockoff_filter<F: Float, R: Rng + ?Sized>(
    x: ArrayView2<F>,
    x_knock: ArrayView2<F>,
    y: ArrayView1<F>,
    q: f64,
    plan: &CvPlan,
    opts: &SolverOptions<F>,
    rng: &mut R,
) -> Result<KnockoffResult> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidConfig(format!("target FDR q = {q} outside (0, 1)")));
    }
    if x.dim() != x_knock.dim() {
        return Err(Error::DimensionMismatch(format!(
            "x is {:?} but knockoffs are {:?}",
            x.dim(),
            x_knock.dim()
        )));
    }
    let p = x.ncols();
    let augmented = concatenate(Axis(1), &[x, x_knock])
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    let report = cross_validate(augmented.view(), y, CvMethod::Lasso, plan, opts, rng)?;
    let coefs: Vec<f64> = report.model.coefs.iter().map(|c| c.to_f64_lossy()).collect();
    let saturated = coefs.iter().all(|&c| c == 0.0);
    let w_stats = lasso_coefficient_difference(&coefs, p);
    let tau = if saturated { f64::INFINITY } else { knockoff_threshold(&w_stats, q) };
    let selected = w_stats
        .iter()
        .enumerate()
        .filter(|(_, &w)| w >= tau)
        .map(|(j, _)| j)
        .collect();
    Ok(KnockoffResult { w_stats, tau, selected, q, elected_alpha: report.elected_alpha, saturated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{child_rng, Stream};
    use crate::spacegen::spectrum_from_draws;

    #[test]
    fn threshold_worked_example() {
        assert_eq!(knockoff_threshold(&[3.0, 2.0, -1.0], 0.5), 2.0);
    }

    #[test]
    fn nonpositive_statistics_give_infinite_threshold() {
        assert_eq!(knockoff_threshold(&[0.0, -1.0, -2.0], 0.9), f64::INFINITY);
        assert_eq!(knockoff_threshold(&[], 0.5), f64::INFINITY);
    }

    #[test]
    fn coefficient_difference() {
        assert_eq!(lasso_coefficient_difference(&[1.0, -2.0, 0.5, 0.0], 2), vec![0.5, 2.0]);
    }

    #[test]
    fn identity_knockoffs_are_uncorrelated_with_x() {
        let p = 4;
        let spectrum = spectrum_from_draws(vec![1.0; p], p, p as f64).unwrap();
        let cov = CovarianceModel { basis_q: Array2::eye(p), spectrum };
        let mut rng = child_rng(5, Stream::Features);
        let n = 20_000;
        let x = Array2::from_shape_simple_fn((n, p), || rng.sample::<f64, _>(StandardNormal));
        let xk = construct_gaussian_knockoffs(x.view(), &cov, &mut child_rng(5, Stream::Knockoffs))
            .unwrap();
        let cross = x.t().dot(&xk) / n as f64;
        assert!(cross.iter().all(|c| c.abs() < 0.05), "{cross}");
        let auto = xk.t().dot(&xk) / n as f64;
        for j in 0..p {
            assert!((auto[[j, j]] - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn rank_deficient_covariance_is_rejected() {
        let spectrum = spectrum_from_draws(vec![1.0, 1.0], 3, 2.0).unwrap();
        let cov = CovarianceModel { basis_q: Array2::eye(3), spectrum };
        let x = Array2::<f64>::zeros((10, 3));
        let err = construct_gaussian_knockoffs(x.view(), &cov, &mut child_rng(0, Stream::Knockoffs));
        assert!(matches!(err, Err(Error::KnockoffsUnsupported(_))));
    }
}
