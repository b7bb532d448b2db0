use serde::{Deserialize, Serialize};

use super::grid::RunKey;
use crate::metrics::MetricsRecord;
use crate::solvers::{FitReport, Method};
use crate::spacegen::SimConfig;

/// Version of the on-disk record layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// One `(config, seed, method)` evaluation as persisted in the store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    /// Hyperparameters; `config.seed` holds the derived run seed.
    pub config: SimConfig,
    /// Replicate seed the run seed was derived from.
    pub seed: u64,
    pub method: Method,
    pub status: RunStatus,
    pub fail_reason: Option<String>,
    pub elected_alpha: Option<f64>,
    pub elected_l1_ratio: Option<f64>,
    pub saturated: Option<bool>,
    pub alpha_max: Option<f64>,
    pub fit_seconds: f64,
    pub iterations: usize,
    pub cv_fits: usize,
    pub metrics: Option<MetricsRecord>,
    pub dataset_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold_note: Option<String>,
}

impl RunRecord {
    pub fn key(&self) -> RunKey {
        RunKey { config: self.config.canonical(), seed: self.seed, method: self.method }
    }

    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }

    pub fn succeeded(
        config: SimConfig,
        seed: u64,
        method: Method,
        report: &FitReport<f64>,
        metrics: MetricsRecord,
        dataset_hash: String,
    ) -> Self {
        let penalized = method != Method::Ols;
        RunRecord {
            schema_version: SCHEMA_VERSION,
            config,
            seed,
            method,
            status: RunStatus::Ok,
            fail_reason: None,
            elected_alpha: penalized.then_some(report.elected_alpha),
            elected_l1_ratio: report.elected_l1_ratio,
            saturated: penalized.then_some(report.saturated),
            alpha_max: Some(report.alpha_max),
            fit_seconds: report.fit_seconds,
            iterations: report.iterations,
            cv_fits: report.cv_fits,
            metrics: Some(metrics),
            dataset_hash: Some(dataset_hash),
            fold_note: report.fold_note.clone(),
        }
    }

    pub fn failed(
        config: SimConfig,
        seed: u64,
        method: Method,
        reason: String,
        dataset_hash: Option<String>,
    ) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            config,
            seed,
            method,
            status: RunStatus::Failed,
            fail_reason: Some(reason),
            elected_alpha: None,
            elected_l1_ratio: None,
            saturated: None,
            alpha_max: None,
            fit_seconds: 0.0,
            iterations: 0,
            cv_fits: 0,
            metrics: None,
            dataset_hash,
            fold_note: None,
        }
    }
}
