use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::solvers::{coordinate_descent, PAPER_ALPHA_GRID, Gram, SolverOptions};
use crate::Float;

pub const DEFAULT_THRESHOLD: f64 = 0.6;
pub const DEFAULT_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    /// Lasso penalties in the `1/(2n)` scaling of [`crate::solvers::fit_lasso`].
    pub lambda_grid: Vec<f64>,
    pub threshold: f64,
    pub iterations: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            lambda_grid: PAPER_ALPHA_GRID.to_vec(),
            threshold: DEFAULT_THRESHOLD,
            iterations: DEFAULT_ITERATIONS,
        }
    }
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidConfig("stability lambda grid is empty".into()));
        }
        if self.lambda_grid.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidConfig("stability lambdas must be finite and > 0".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold {} outside (0, 1)",
                self.threshold
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("need at least one iteration".into()));
        }
        Ok(())
    }

    /// Notes flagging values that fall back to the built-in defaults, which
    /// are arbitrary rather than taken from any published setting.
    pub fn default_notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.iterations == DEFAULT_ITERATIONS {
            notes.push(format!("M = {DEFAULT_ITERATIONS} is a built-in default, not a tuned value"));
        }
        if self.threshold == DEFAULT_THRESHOLD {
            notes.push(format!(
                "pi_thr = {DEFAULT_THRESHOLD} is a built-in default, not a tuned value"
            ));
        }
        notes
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityResult {
    pub lambda_grid: Vec<f64>,
    /// Selection counts, features by lambdas.
    pub counts: Array2<usize>,
    /// `counts / iterations`.
    pub selection_probs: Array2<f64>,
    pub iterations: usize,
    pub threshold: f64,
    pub stable_set: Vec<usize>,
    pub notes: Vec<String>,
}

impl StabilityResult {
    /// Maximum selection probability of each feature over the grid.
    pub fn max_probs(&self) -> Array1<f64> {
        self.selection_probs.map_axis(Axis(1), |row| row.fold(0.0, |a, &b| f64::max(a, b)))
    }

    pub fn stable_set_at(&self, threshold: f64) -> Vec<usize> {
        self.max_probs()
            .iter()
            .enumerate()
            .filter(|(_, &m)| m >= threshold)
            .map(|(k, _)| k)
            .collect()
    }

    fn from_counts(
        counts: Array2<usize>,
        cfg: &StabilityConfig,
        notes: Vec<String>,
    ) -> Self {
        let m = cfg.iterations as f64;
        let selection_probs = counts.mapv(|c| c as f64 / m);
        let mut out = StabilityResult {
            lambda_grid: cfg.lambda_grid.clone(),
            counts,
            selection_probs,
            iterations: cfg.iterations,
            threshold: cfg.threshold,
            stable_set: Vec::new(),
            notes,
        };
        out.stable_set = out.stable_set_at(cfg.threshold);
        out
    }
}

/// Stability selection. Each of the `M` iterations draws a half-size
/// subsample without replacement and fits the Lasso over the whole grid,
/// largest penalty first with warm starts. Per-iteration seeds are drawn
/// from `rng` before any fitting, so the result does not depend on thread
/// scheduling.
pub fn stability_select<F: Float, R: Rng + ?Sized>(
    x: ArrayView2<F>,
    y: ArrayView1<F>,
    cfg: &StabilityConfig,
    rng: &mut R,
) -> Result<StabilityResult> {
    cfg.validate()?;
    let (n, p) = x.dim();
    if n != y.len() {
        return Err(Error::DimensionMismatch(format!("x has {n} rows, y has {}", y.len())));
    }
    if n < 4 {
        return Err(Error::InvalidConfig(format!("stability selection needs n >= 4, got {n}")));
    }
    let seeds: Vec<u64> = (0..cfg.iterations).map(|_| rng.random()).collect();

    let mut order: Vec<usize> = (0..cfg.lambda_grid.len()).collect();
    order.sort_by(|&a, &b| cfg.lambda_grid[b].total_cmp(&cfg.lambda_grid[a]));
    let opts = SolverOptions::<F>::default();

    let per_iter: Vec<Result<Vec<Vec<usize>>>> = seeds
        .par_iter()
        .enumerate()
        .map(|(it, &seed)| {
            let mut local = SimRng::seed_from_u64(seed);
            let rows = sample(&mut local, n, n / 2).into_vec();
            let xs = x.select(Axis(0), &rows);
            let ys = y.select(Axis(0), &rows);
            let wrap = |e| Error::StabilityIteration { iteration: it, source: Box::new(e) };
            let gram = Gram::new(xs.view(), ys.view(), true).map_err(wrap)?;
            let mut selected = vec![Vec::new(); cfg.lambda_grid.len()];
            let mut warm: Option<Array1<F>> = None;
            for &li in &order {
                let out = coordinate_descent(
                    &gram,
                    F::cst(cfg.lambda_grid[li]),
                    F::one(),
                    warm.as_ref().map(|w| w.view()),
                    &opts,
                    false,
                )
                .map_err(wrap)?;
                selected[li] =
                    out.coefs.iter().enumerate().filter(|(_, c)| **c != F::zero()).map(|(j, _)| j).collect();
                warm = Some(out.coefs);
            }
            Ok(selected)
        })
        .collect();

    let mut counts = Array2::<usize>::zeros((p, cfg.lambda_grid.len()));
    for result in per_iter {
        for (li, sel) in result?.into_iter().enumerate() {
            for j in sel {
                counts[[j, li]] += 1;
            }
        }
    }
    Ok(StabilityResult::from_counts(counts, cfg, cfg.default_notes()))
}
