//! Support recovery, coefficient error and prediction error of a fit.

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::LinearModel;
use crate::Float;

/// Scores of one fit against the ground truth and a held-out set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub rel_l2: f64,
    pub rmse_test: f64,
    pub selected_count: usize,
}

impl MetricsRecord {
    pub const NAMES: [&'static str; 6] =
        ["precision", "recall", "f1", "rel_l2", "rmse_test", "selected_count"];

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "precision" => self.precision,
            "recall" => self.recall,
            "f1" => self.f1,
            "rel_l2" | "l2" => self.rel_l2,
            "rmse_test" | "rmse" => self.rmse_test,
            "selected_count" => self.selected_count as f64,
            other => return Err(Error::UnknownMetric(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub selected_count: usize,
}

/// Indices the model counts as selected: exact non-zeros for sparse methods,
/// every feature for Ridge and OLS.
pub fn selected_features<F: Float>(model: &LinearModel<F>) -> Vec<usize> {
    if model.method.is_sparse() {
        model.nonzero()
    } else {
        (0..model.coefs.len()).collect()
    }
}

/// Precision, recall and F1 of `selected` against `truth` (both index sets).
/// An empty selection scores 1 when the truth is empty too, 0 otherwise; the
/// same rule applies to recall with the roles swapped.
pub fn support_scores(truth: &[usize], selected: &[usize]) -> SupportScores {
    let hits = selected.iter().filter(|j| truth.contains(j)).count() as f64;
    let ratio = |num: f64, den: usize, other_empty: bool| {
        if den == 0 {
            if other_empty {
                1.0
            } else {
                0.0
            }
        } else {
            num / den as f64
        }
    };
    let precision = ratio(hits, selected.len(), truth.is_empty());
    let recall = ratio(hits, truth.len(), selected.is_empty());
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    SupportScores { precision, recall, f1, selected_count: selected.len() }
}

pub fn support_metrics<F: Float>(beta_true: ArrayView1<F>, model: &LinearModel<F>) -> Result<SupportScores> {
    if beta_true.len() != model.coefs.len() {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} entries, model has {}",
            beta_true.len(),
            model.coefs.len()
        )));
    }
    let truth: Vec<usize> = (0..beta_true.len()).filter(|&j| beta_true[j] != F::zero()).collect();
    Ok(support_scores(&truth, &selected_features(model)))
}

/// `||beta_hat - beta|| / ||beta||`.
pub fn relative_l2<F: Float>(beta_true: ArrayView1<F>, beta_hat: ArrayView1<F>) -> Result<F> {
    if beta_true.len() != beta_hat.len() {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} entries, estimate has {}",
            beta_true.len(),
            beta_hat.len()
        )));
    }
    let norm = beta_true.dot(&beta_true).sqrt();
    if norm == F::zero() {
        return Err(Error::UndefinedMetric("relative L2 error of a zero coefficient vector".into()));
    }
    let diff = &beta_hat - &beta_true;
    Ok(diff.dot(&diff).sqrt() / norm)
}

pub fn rmse<F: Float>(y_true: ArrayView1<F>, y_pred: ArrayView1<F>) -> Result<F> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch(format!("{} targets vs {} predictions", y_true.len(), y_pred.len())));
    }
    if y_true.is_empty() {
        return Err(Error::Empty("rmse of zero observations".into()));
    }
    let sse: F = y_true.iter().zip(y_pred.iter()).map(|(&a, &b)| (a - b) * (a - b)).sum();
    Ok((sse / F::from_count(y_true.len())).sqrt())
}

/// All metrics of `model` at once; RMSE on `(x_test, y_test)`.
pub fn evaluate<F: Float>(
    beta_true: ArrayView1<F>,
    model: &LinearModel<F>,
    x_test: ArrayView2<F>,
    y_test: ArrayView1<F>,
) -> Result<MetricsRecord> {
    let s = support_metrics(beta_true, model)?;
    let rel = relative_l2(beta_true, model.coefs.view())?;
    let pred = model.predict(x_test);
    let err = rmse(y_test, pred.view())?;
    Ok(MetricsRecord {
        precision: s.precision,
        recall: s.recall,
        f1: s.f1,
        rel_l2: rel.to_f64_lossy(),
        rmse_test: err.to_f64_lossy(),
        selected_count: s.selected_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::Method;
    use ndarray::{array, Array1};

    #[test]
    fn counting_example() {
        let s = support_scores(&[1, 2], &[2, 3]);
        assert_eq!((s.precision, s.recall, s.f1), (0.5, 0.5, 0.5));
    }

    #[test]
    fn empty_conventions() {
        let s = support_scores(&[], &[]);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = support_scores(&[0], &[]);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        let s = support_scores(&[], &[0]);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn ridge_selects_everything() {
        let beta = array![1.0, -2.0, 0.5];
        let m = LinearModel { intercept: 0.0, coefs: array![0.0, 0.1, 0.0], method: Method::Ridge };
        let s = support_metrics(beta.view(), &m).unwrap();
        assert_eq!(s.recall, 1.0);
        assert_eq!(s.selected_count, 3);
    }

    #[test]
    fn relative_l2_cases() {
        let b = array![3.0, 4.0];
        assert_eq!(relative_l2(b.view(), array![3.0, 0.0].view()).unwrap(), 0.8);
        assert_eq!(relative_l2(b.view(), Array1::zeros(2).view()).unwrap(), 1.0);
        assert_eq!(relative_l2(b.view(), b.view()).unwrap(), 0.0);
        assert!(relative_l2(Array1::<f64>::zeros(2).view(), b.view()).is_err());
    }

    #[test]
    fn rmse_cases() {
        let z = Array1::<f64>::zeros(4);
        assert_eq!(rmse(array![3.0, 4.0, 0.0, 0.0].view(), z.view()).unwrap(), 2.5);
        assert_eq!(rmse(array![1.0, -1.0].view(), array![0.0, 0.0].view()).unwrap(), 1.0);
        assert!(rmse(Array1::<f64>::zeros(0).view(), Array1::zeros(0).view()).is_err());
    }

    #[test]
    fn metric_lookup() {
        let r = MetricsRecord { precision: 0.1, recall: 0.2, f1: 0.3, rel_l2: 0.4, rmse_test: 0.5, selected_count: 6 };
        assert_eq!(r.get("rmse").unwrap(), 0.5);
        assert!(matches!(r.get("auc"), Err(Error::UnknownMetric(_))));
    }
}
