//! Grid sweeps over the configuration space with an append-only result store.
//!
//! A [`GridSpec`] lists the levels of every hyperparameter; its cartesian
//! product times `seeds_per_config` seeds times the chosen methods is the
//! plan. [`run_sweep`] executes whatever part of the plan is missing from the
//! store, so an interrupted sweep resumes where it stopped.

mod grid;
mod record;
mod store;
mod summary;
mod sweep;

pub use grid::{enumerate_grid, planned_runs, CvSettings, GridSpec, Preset, RunKey};
pub use record::{RunRecord, RunStatus, SCHEMA_VERSION};
pub use store::ResultStore;
pub use summary::{export_summary, format_sig, record_value, SummaryRow, SummaryTable};
pub use sweep::{resume, run_cell, run_sweep, SweepReport};
