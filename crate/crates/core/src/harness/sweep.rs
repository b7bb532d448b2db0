use std::collections::{BTreeMap, HashSet};
use std::sync::mpsc;

use rayon::prelude::*;

use super::grid::{enumerate_grid, planned_runs, CvSettings, GridSpec, RunKey};
use super::record::RunRecord;
use super::store::ResultStore;
use crate::error::{Error, Result};
use crate::metrics::evaluate;
use crate::rng::{child_rng, derive_run_seed, Stream};
use crate::solvers::{cross_validate, fit_ols, fit_post_lasso, CvMethod, FitReport, Method};
use crate::spacegen::{simulate, SimConfig, Simulation};

/// Evaluates `methods` on one seeded world. Every method sees the same data,
/// the same holdout split and the same CV folds. Failures become failed
/// records instead of errors.
pub fn run_cell(config: &SimConfig, seed: u64, methods: &[Method], cv: &CvSettings) -> Vec<RunRecord> {
    let run_seed = derive_run_seed(&config.canonical(), seed);
    let world = config.with_seed(run_seed);
    let sim = match simulate(&world) {
        Ok(s) => s,
        Err(e) => {
            return methods
                .iter()
                .map(|&m| RunRecord::failed(world.clone(), seed, m, e.to_string(), None))
                .collect()
        }
    };
    let hash = sim.dataset.content_hash();
    methods
        .iter()
        .map(|&m| match fit_and_score(&sim, m, cv) {
            Ok((report, metrics)) => {
                RunRecord::succeeded(world.clone(), seed, m, &report, metrics, hash.clone())
            }
            Err(e) => RunRecord::failed(world.clone(), seed, m, e.to_string(), Some(hash.clone())),
        })
        .collect()
}

fn fit_and_score(
    sim: &Simulation,
    method: Method,
    cv: &CvSettings,
) -> Result<(FitReport<f64>, crate::metrics::MetricsRecord)> {
    let ds = &sim.dataset;
    let (x, y) = (ds.train_x(), ds.train_y());
    let plan = cv.plan(sim.config.sample_n);
    let opts = cv.solver();
    let mut rng = child_rng(sim.config.seed, Stream::CrossValidation);
    let report = match method {
        Method::Ridge => cross_validate(x.view(), y.view(), CvMethod::Ridge, &plan, &opts, &mut rng)?,
        Method::Lasso => cross_validate(x.view(), y.view(), CvMethod::Lasso, &plan, &opts, &mut rng)?,
        Method::ElasticNet => {
            cross_validate(x.view(), y.view(), CvMethod::ElasticNet, &plan, &opts, &mut rng)?
        }
        Method::PostLassoOls => fit_post_lasso(x.view(), y.view(), &plan, &opts, &mut rng)?,
        Method::Ols => {
            let t = std::time::Instant::now();
            let model = fit_ols(x.view(), y.view(), &opts)?;
            FitReport {
                model,
                elected_alpha: 0.0,
                elected_l1_ratio: None,
                alpha_max: 0.0,
                saturated: false,
                cv_mse: Vec::new(),
                cv_fits: 0,
                iterations: 0,
                fit_seconds: t.elapsed().as_secs_f64(),
                fold_note: None,
            }
        }
    };
    let metrics = evaluate(sim.truth.beta.view(), &report.model, ds.test_x().view(), ds.test_y().view())?;
    Ok((report, metrics))
}

/// Planned keys that the store does not hold yet, in plan order.
pub fn resume(store: &ResultStore, spec: &GridSpec) -> Result<Vec<RunKey>> {
    let done = store.completed_keys()?;
    Ok(planned_runs(spec).into_iter().filter(|k| !done.contains(k)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepReport {
    pub planned: usize,
    pub already_done: usize,
    pub written: usize,
    pub failed: usize,
}

/// Runs the missing part of `spec` on `workers` threads, appending to
/// `store` from a single writer.
pub fn run_sweep(spec: &GridSpec, store: &ResultStore, workers: usize) -> Result<SweepReport> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    let planned = planned_runs(spec).len();
    let remaining = resume(store, spec)?;
    let todo: HashSet<&RunKey> = remaining.iter().collect();

    // Group the remaining keys into cells, keeping grid order.
    let mut cells: BTreeMap<(usize, u64), (SimConfig, Vec<Method>)> = BTreeMap::new();
    for (i, config) in enumerate_grid(spec).into_iter().enumerate() {
        let canonical = config.canonical();
        for seed in spec.seeds() {
            let methods: Vec<Method> = spec
                .methods
                .iter()
                .copied()
                .filter(|&method| todo.contains(&RunKey { config: canonical.clone(), seed, method }))
                .collect();
            if !methods.is_empty() {
                cells.insert((i, seed), (config.clone(), methods));
            }
        }
    }
    let cells: Vec<((usize, u64), (SimConfig, Vec<Method>))> = cells.into_iter().collect();
    log::info!("{} of {planned} runs left in {} cells", remaining.len(), cells.len());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let mut writer = store.writer()?;
    let mut report = SweepReport { planned, already_done: planned - remaining.len(), ..Default::default() };
    let (tx, rx) = mpsc::channel::<Vec<RunRecord>>();
    let cv = &spec.cv;
    std::thread::scope(|scope| -> Result<()> {
        scope.spawn(move || {
            pool.install(|| {
                cells.par_iter().for_each_with(tx, |tx, ((_, seed), (config, methods))| {
                    // The receiver only disappears after a write error.
                    let _ = tx.send(run_cell(config, *seed, methods, cv));
                });
            });
        });
        for batch in rx {
            for r in &batch {
                writer.write(r)?;
                report.written += 1;
                report.failed += usize::from(!r.is_ok());
            }
        }
        Ok(())
    })?;
    Ok(report)
}
