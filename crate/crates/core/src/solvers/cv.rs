use std::time::Instant;

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cd::coordinate_descent;
use super::gram::Gram;
use super::ridge::ridge_from_gram;
use super::{fit_ols, LinearModel, Method, SolverOptions};
use crate::error::{Error, Result};
use crate::Float;

/// Penalty grid searched by every cross-validated method, descending.
pub const PAPER_ALPHA_GRID: [f64; 9] = [1e5, 1e4, 1e3, 1e2, 1e1, 1.0, 1e-1, 1e-2, 1e-3];

/// Mixing grid searched by the elastic net.
pub const PAPER_L1_GRID: [f64; 8] = [0.0, 0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0];

const SAMPLE_SIZE_LEVELS: [usize; 4] = [100, 1_000, 10_000, 100_000];
const TIE_RTOL: f64 = 1e-12;

/// Fold count for a data set of `n` observations, plus a note when `n` is
/// not one of the levels the schedule was calibrated on.
pub fn folds_for_sample_size(n: usize) -> (usize, Option<String>) {
    let folds = match n {
        0..=100 => 5,
        101..=1_000 => 4,
        1_001..=10_000 => 3,
        _ => 2,
    };
    let note = (!SAMPLE_SIZE_LEVELS.contains(&n)).then(|| {
        format!("n = {n} is off the sample-size grid; using the {folds}-fold schedule of its band")
    });
    (folds, note)
}

/// Cross-validation grid and fold count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvPlan {
    pub alpha_grid: Vec<f64>,
    /// Only searched by [`CvMethod::ElasticNet`].
    pub l1_grid: Vec<f64>,
    pub folds: usize,
    #[serde(default)]
    pub fold_note: Option<String>,
}

impl CvPlan {
    /// Default grids with the fold schedule for a data set of size `sample_n`.
    pub fn paper(sample_n: usize) -> Self {
        let (folds, fold_note) = folds_for_sample_size(sample_n);
        CvPlan {
            alpha_grid: PAPER_ALPHA_GRID.to_vec(),
            l1_grid: PAPER_L1_GRID.to_vec(),
            folds,
            fold_note,
        }
    }

    pub fn with_alpha_grid(mut self, grid: Vec<f64>) -> Self {
        self.alpha_grid = grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::InvalidPlan("alpha grid is empty".into()));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidPlan(format!("alpha grid entry {a} is not strictly positive")));
        }
        if self.l1_grid.is_empty() {
            return Err(Error::InvalidPlan("l1 grid is empty".into()));
        }
        if let Some(r) = self.l1_grid.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::InvalidPlan(format!("l1 ratio {r} outside [0, 1]")));
        }
        if self.folds < 2 {
            return Err(Error::InvalidPlan(format!("need at least 2 folds, got {}", self.folds)));
        }
        Ok(())
    }

    fn alpha_desc(&self) -> Vec<f64> {
        let mut a = self.alpha_grid.clone();
        a.sort_by(|x, y| y.total_cmp(x));
        a.dedup();
        a
    }

    fn alpha_top(&self) -> f64 {
        self.alpha_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvMethod {
    Ridge,
    Lasso,
    ElasticNet,
}

impl From<CvMethod> for Method {
    fn from(m: CvMethod) -> Method {
        match m {
            CvMethod::Ridge => Method::Ridge,
            CvMethod::Lasso => Method::Lasso,
            CvMethod::ElasticNet => Method::ElasticNet,
        }
    }
}

/// Mean validation error at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvPoint {
    pub alpha: f64,
    pub l1_ratio: Option<f64>,
    pub mean_mse: f64,
}

#[derive(Debug, Clone)]
pub struct FitReport<F> {
    pub model: LinearModel<F>,
    pub elected_alpha: f64,
    pub elected_l1_ratio: Option<f64>,
    /// Lasso `alpha_max` of the full training data.
    pub alpha_max: f64,
    /// The elected penalty is the largest value of the grid.
    pub saturated: bool,
    pub cv_mse: Vec<CvPoint>,
    /// Number of fits made during the grid search (final refit excluded).
    pub cv_fits: usize,
    /// Coordinate-descent sweeps of the final refit; 0 for closed forms.
    pub iterations: usize,
    pub fit_seconds: f64,
    pub fold_note: Option<String>,
}

fn assign_folds<R: Rng + ?Sized>(n: usize, folds: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    if n < 2 * folds {
        return Err(Error::InvalidPlan(format!(
            "{n} observations cannot fill {folds} folds with at least 2 each"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for k in 0..folds {
        let len = base + usize::from(k < extra);
        out.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(out)
}

fn validation_mse<F: Float>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    gram: &Gram<F>,
    coefs: &Array1<F>,
) -> f64 {
    let intercept = gram.intercept_for(coefs);
    let pred = x.dot(coefs) + intercept;
    let n = y.len() as f64;
    y.iter().zip(pred.iter()).map(|(&a, &b)| (a - b).to_f64_lossy().powi(2)).sum::<f64>() / n
}

/// Sweeps one fold over the whole grid. Returns `(alpha, rho, mse)` triples
/// and the number of fits.
fn fold_path<F: Float>(
    gram: &Gram<F>,
    xv: ArrayView2<F>,
    yv: ArrayView1<F>,
    method: CvMethod,
    plan: &CvPlan,
    opts: &SolverOptions<F>,
) -> Result<Vec<(f64, Option<f64>, f64)>> {
    let alphas = plan.alpha_desc();
    let mut out = Vec::new();
    match method {
        CvMethod::Ridge => {
            for &a in &alphas {
                let w = ridge_from_gram(gram, F::cst(a));
                out.push((a, None, validation_mse(xv, yv, gram, &w)));
            }
        }
        CvMethod::Lasso | CvMethod::ElasticNet => {
            let rhos: Vec<Option<f64>> = if method == CvMethod::Lasso {
                vec![None]
            } else {
                plan.l1_grid.iter().map(|&r| Some(r)).collect()
            };
            let n_train = F::from_count(gram.n);
            for rho in rhos {
                let r = rho.unwrap_or(1.0);
                let mut warm: Option<Array1<F>> = None;
                for &a in &alphas {
                    let w = if r == 0.0 {
                        ridge_from_gram(gram, F::cst(a) * n_train)
                    } else {
                        let res = coordinate_descent(
                            gram,
                            F::cst(a),
                            F::cst(r),
                            warm.as_ref().map(|w| w.view()),
                            opts,
                            false,
                        )?;
                        res.coefs
                    };
                    out.push((a, rho, validation_mse(xv, yv, gram, &w)));
                    warm = Some(w);
                }
            }
        }
    }
    Ok(out)
}

fn elect(points: &[CvPoint]) -> CvPoint {
    let mut best = points[0];
    for &pt in &points[1..] {
        let scale = best.mean_mse.abs().max(pt.mean_mse.abs()).max(f64::MIN_POSITIVE);
        let diff = pt.mean_mse - best.mean_mse;
        if diff < -TIE_RTOL * scale {
            best = pt;
        } else if diff.abs() <= TIE_RTOL * scale {
            let rho_gt = pt.l1_ratio.unwrap_or(0.0) > best.l1_ratio.unwrap_or(0.0);
            if pt.alpha > best.alpha || (pt.alpha == best.alpha && rho_gt) {
                best = pt;
            }
        }
    }
    best
}

/// K-fold grid search followed by a refit on all of `x`, `y` at the elected
/// penalty. Folds are contiguous blocks of a seeded shuffle; the `alpha`
/// path is walked in decreasing order with warm starts.
pub fn cross_validate<F: Float, R: Rng + ?Sized>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    method: CvMethod,
    plan: &CvPlan,
    opts: &SolverOptions<F>,
    rng: &mut R,
) -> Result<FitReport<F>> {
    plan.validate()?;
    let n = x.nrows();
    if n != y.len() {
        return Err(Error::DimensionMismatch(format!("x has {n} rows, y has {}", y.len())));
    }
    let started = Instant::now();
    let folds = assign_folds(n, plan.folds, rng)?;

    let mut sums: Vec<(f64, Option<f64>, f64)> = Vec::new();
    let mut cv_fits = 0;
    for (k, val) in folds.iter().enumerate() {
        let train: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        let xt = x.select(Axis(0), &train);
        let yt = y.select(Axis(0), &train);
        let xv = x.select(Axis(0), val);
        let yv = y.select(Axis(0), val);
        let gram = Gram::new(xt.view(), yt.view(), opts.fit_intercept)?;
        let path = fold_path(&gram, xv.view(), yv.view(), method, plan, opts)?;
        cv_fits += path.len();
        if sums.is_empty() {
            sums = path;
        } else {
            for (acc, (_, _, mse)) in sums.iter_mut().zip(path) {
                acc.2 += mse;
            }
        }
    }
    let k = folds.len() as f64;
    let cv_mse: Vec<CvPoint> = sums
        .into_iter()
        .map(|(alpha, l1_ratio, s)| CvPoint { alpha, l1_ratio, mean_mse: s / k })
        .collect();
    let best = elect(&cv_mse);

    let gram = Gram::new(x, y, opts.fit_intercept)?;
    let alpha_max = gram.alpha_max().to_f64_lossy();
    let a = F::cst(best.alpha);
    let (coefs, iterations) = match method {
        CvMethod::Ridge => (ridge_from_gram(&gram, a), 0),
        _ => {
            let rho = best.l1_ratio.unwrap_or(1.0);
            if rho == 0.0 {
                (ridge_from_gram(&gram, a * F::from_count(n)), 0)
            } else {
                let out = coordinate_descent(&gram, a, F::cst(rho), None, opts, false)?;
                (out.coefs, out.sweeps)
            }
        }
    };
    let model = LinearModel { intercept: gram.intercept_for(&coefs), coefs, method: method.into() };
    Ok(FitReport {
        model,
        elected_alpha: best.alpha,
        elected_l1_ratio: best.l1_ratio,
        alpha_max,
        saturated: best.alpha == plan.alpha_top(),
        cv_mse,
        cv_fits,
        iterations,
        fit_seconds: started.elapsed().as_secs_f64(),
        fold_note: plan.fold_note.clone(),
    })
}

/// Lasso-CV selection followed by an unpenalized least-squares refit on the
/// selected columns, using the same data for both stages.
pub fn fit_post_lasso<F: Float, R: Rng + ?Sized>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    plan: &CvPlan,
    opts: &SolverOptions<F>,
    rng: &mut R,
) -> Result<FitReport<F>> {
    let started = Instant::now();
    let mut report = cross_validate(x, y, CvMethod::Lasso, plan, opts, rng)?;
    let support = report.model.nonzero();
    let p = x.ncols();
    let model = if support.is_empty() {
        let intercept = if opts.fit_intercept { y.mean().unwrap_or(F::zero()) } else { F::zero() };
        LinearModel { intercept, coefs: Array1::zeros(p), method: Method::PostLassoOls }
    } else {
        let sub = x.select(Axis(1), &support);
        let ols = fit_ols(sub.view(), y, opts)?;
        let mut coefs = Array1::zeros(p);
        for (&j, &c) in support.iter().zip(ols.coefs.iter()) {
            coefs[j] = c;
        }
        LinearModel { intercept: ols.intercept, coefs, method: Method::PostLassoOls }
    };
    report.model = model;
    report.fit_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn instance(n: usize, p: usize, seed: u64) -> (Array2<f64>, Array1<f64>) {
        let mut rng = SimRng::seed_from_u64(seed);
        let x: Array2<f64> = Array2::from_shape_fn((n, p), |_| StandardNormal.sample(&mut rng));
        let beta = Array1::from_shape_fn(p, |j| if j < 3 { 1.0 } else { 0.0 });
        let noise = Array1::from_shape_fn(n, |_| { let z: f64 = StandardNormal.sample(&mut rng); 0.5 * z });
        let y = x.dot(&beta) + noise;
        (x, y)
    }

    #[test]
    fn fold_schedule() {
        assert_eq!(folds_for_sample_size(100), (5, None));
        assert_eq!(folds_for_sample_size(1000).0, 4);
        assert_eq!(folds_for_sample_size(10_000).0, 3);
        assert_eq!(folds_for_sample_size(100_000).0, 2);
        let (k, note) = folds_for_sample_size(2500);
        assert_eq!(k, 3);
        assert!(note.is_some());
    }

    #[test]
    fn fit_counts() {
        let (x, y) = instance(100, 6, 1);
        let plan = CvPlan::paper(100);
        let mut rng = SimRng::seed_from_u64(3);
        let r = cross_validate(x.view(), y.view(), CvMethod::Lasso, &plan, &SolverOptions::default(), &mut rng)
            .unwrap();
        assert_eq!(r.cv_fits, 45);
        let r = cross_validate(x.view(), y.view(), CvMethod::ElasticNet, &plan, &SolverOptions::default(), &mut rng)
            .unwrap();
        assert_eq!(r.cv_fits, 360);
        assert_eq!(r.cv_mse.len(), 72);
    }

    #[test]
    fn tie_prefers_larger_alpha_then_rho() {
        let pts = [
            CvPoint { alpha: 0.1, l1_ratio: Some(0.5), mean_mse: 1.0 },
            CvPoint { alpha: 1.0, l1_ratio: Some(0.1), mean_mse: 1.0 },
            CvPoint { alpha: 1.0, l1_ratio: Some(0.9), mean_mse: 1.0 },
            CvPoint { alpha: 10.0, l1_ratio: Some(0.9), mean_mse: 1.5 },
        ];
        let b = elect(&pts);
        assert_eq!((b.alpha, b.l1_ratio), (1.0, Some(0.9)));
    }

    #[test]
    fn saturation_flag_tracks_grid_top() {
        let (x, _) = instance(60, 4, 2);
        let y = Array1::from_shape_fn(60, |i| ((i * 7919) % 13) as f64);
        let plan = CvPlan::paper(60);
        let mut rng = SimRng::seed_from_u64(0);
        let r = cross_validate(x.view(), y.view(), CvMethod::Lasso, &plan, &SolverOptions::default(), &mut rng)
            .unwrap();
        assert_eq!(r.saturated, r.elected_alpha == 1e5);
    }

    #[test]
    fn too_few_rows_per_fold() {
        let (x, y) = instance(9, 2, 5);
        let plan = CvPlan::paper(9);
        let mut rng = SimRng::seed_from_u64(0);
        let err = cross_validate(x.view(), y.view(), CvMethod::Ridge, &plan, &SolverOptions::default(), &mut rng);
        assert!(matches!(err, Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn post_lasso_empty_support_is_mean() {
        let (x, _) = instance(50, 3, 9);
        let y = Array1::from_shape_fn(50, |i| 2.0 + if i % 2 == 0 { 0.01 } else { -0.01 });
        let plan = CvPlan::paper(50).with_alpha_grid(vec![1e5]);
        let mut rng = SimRng::seed_from_u64(0);
        let r = fit_post_lasso(x.view(), y.view(), &plan, &SolverOptions::default(), &mut rng).unwrap();
        assert!(r.model.coefs.iter().all(|&c| c == 0.0));
        assert!((r.model.intercept - 2.0).abs() < 1e-12);
        assert_eq!(r.model.method, Method::PostLassoOls);
    }
}
