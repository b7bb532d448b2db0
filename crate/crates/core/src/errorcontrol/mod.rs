//! Error-controlled variable selection: stability selection and the
//! model-X knockoff filter.

mod knockoffs;
mod stability;

pub use knockoffs::{
    construct_gaussian_knockoffs, gaussian_knockoffs, knockoff_filter, knockoff_threshold,
    lasso_coefficient_difference, KnockoffResult,
};
pub use stability::{stability_select, StabilityConfig, StabilityResult};
