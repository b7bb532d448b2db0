use ndarray::{ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::solvers::{cross_validate, CvMethod, CvPlan, SolverOptions};
use crate::Float;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n: usize,
    pub p: usize,
    pub n_over_p: f64,
    pub underdetermined: bool,
    /// Condition number of the centered design; infinite when rank deficient.
    pub kappa_design: f64,
    pub elected_alpha: f64,
    pub alpha_max: f64,
    pub alpha_ratio: f64,
    pub saturated: bool,
    /// Zero-variance columns left out of the condition number.
    pub constant_columns: Vec<usize>,
    pub notes: Vec<String>,
}

impl Diagnostics {
    /// Diagnostics from already known quantities.
    pub fn from_parts(
        n: usize,
        p: usize,
        kappa_design: f64,
        elected_alpha: f64,
        alpha_max: f64,
        saturated: bool,
    ) -> Self {
        Diagnostics {
            n,
            p,
            n_over_p: n as f64 / p as f64,
            underdetermined: p > n,
            kappa_design,
            elected_alpha,
            alpha_max,
            alpha_ratio: if alpha_max > 0.0 { elected_alpha / alpha_max } else { f64::INFINITY },
            saturated,
            constant_columns: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn rank_deficient(&self) -> bool {
        self.kappa_design.is_infinite()
    }
}

/// Condition number of the centered design and one Lasso cross-validation
/// pass whose elected penalty serves as a signal-to-noise proxy.
pub fn compute_diagnostics<F: Float, R: Rng + ?Sized>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    plan: &CvPlan,
    rng: &mut R,
) -> Result<Diagnostics> {
    let (n, p) = x.dim();
    if n < 5 {
        return Err(Error::InvalidConfig(format!("diagnostics need n >= 5, got {n}")));
    }
    if p == 0 {
        return Err(Error::Empty("design has no columns".into()));
    }
    let means = x.mean_axis(Axis(0)).expect("n > 0");
    let centered = &x - &means;
    let constant_columns: Vec<usize> = (0..p)
        .filter(|&j| centered.column(j).iter().all(|v| *v == F::zero()))
        .collect();
    let mut notes = Vec::new();
    let kept: Vec<usize> = (0..p).filter(|j| !constant_columns.contains(j)).collect();
    if !constant_columns.is_empty() {
        log::warn!("{} constant column(s) excluded from the condition number", constant_columns.len());
        notes.push(format!(
            "constant columns {constant_columns:?} excluded from the condition number"
        ));
    }
    let kappa_design = if kept.is_empty() {
        f64::INFINITY
    } else {
        let sv = singular_values(centered.select(Axis(1), &kept).view());
        let max = sv.iter().map(|s| s.to_f64_lossy()).fold(0.0, f64::max);
        let min = sv.iter().map(|s| s.to_f64_lossy()).fold(f64::INFINITY, f64::min);
        if kept.len() > n || max == 0.0 || min < RANK_TOLERANCE * max {
            f64::INFINITY
        } else {
            max / min
        }
    };
    if kappa_design.is_infinite() {
        notes.push(if p > n {
            "design is underdetermined (p > n); condition number is infinite".to_string()
        } else {
            "design is rank deficient; condition number is infinite".to_string()
        });
    }

    let report = cross_validate(x, y, CvMethod::Lasso, plan, &SolverOptions::default(), rng)?;
    let mut diag = Diagnostics::from_parts(
        n,
        p,
        kappa_design,
        report.elected_alpha,
        report.alpha_max,
        report.saturated,
    );
    diag.constant_columns = constant_columns;
    diag.notes = notes;
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{child_rng, Stream};
    use ndarray::{Array1, Array2};

    fn plan() -> CvPlan {
        CvPlan::paper(40)
    }

    #[test]
    fn orthogonal_design_has_unit_kappa() {
        // Centered, mutually orthogonal columns with equal norms.
        let mut x = Array2::<f64>::zeros((40, 2));
        for i in 0..40 {
            x[[i, 0]] = if i % 2 == 0 { 1.0 } else { -1.0 };
            x[[i, 1]] = if (i / 2) % 2 == 0 { 1.0 } else { -1.0 };
        }
        let y = x.column(0).to_owned();
        let d = compute_diagnostics(x.view(), y.view(), &plan(), &mut child_rng(0, Stream::CrossValidation))
            .unwrap();
        assert!((d.kappa_design - 1.0).abs() < 1e-10, "{}", d.kappa_design);
        assert!(!d.underdetermined);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let mut rng = child_rng(1, Stream::Features);
        let mut x = Array2::from_shape_simple_fn((40, 3), || rng.random::<f64>());
        let c = x.column(0).to_owned();
        x.column_mut(2).assign(&c);
        let y = Array1::from_shape_fn(40, |i| i as f64);
        let d = compute_diagnostics(x.view(), y.view(), &plan(), &mut child_rng(0, Stream::CrossValidation))
            .unwrap();
        assert!(d.rank_deficient());
    }

    #[test]
    fn constant_column_is_flagged_and_excluded() {
        let mut rng = child_rng(2, Stream::Features);
        let mut x = Array2::from_shape_simple_fn((40, 3), || rng.random::<f64>());
        x.column_mut(1).fill(3.0);
        let y = x.column(0).to_owned();
        let d = compute_diagnostics(x.view(), y.view(), &plan(), &mut child_rng(0, Stream::CrossValidation))
            .unwrap();
        assert_eq!(d.constant_columns, vec![1]);
        assert!(d.kappa_design.is_finite());
    }
}
