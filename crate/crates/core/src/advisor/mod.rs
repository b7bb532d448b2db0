//! Observable-regime diagnostics and the objective-driven method advisor.

mod diagnostics;
mod rules;

pub use diagnostics::{compute_diagnostics, Diagnostics, RANK_TOLERANCE};
pub use rules::{
    advise, classify_snr_regime, regime_of, KappaBand, MethodChoice, Objective, Recommendation,
    RegimeKey, Rule, SizeRegime, SnrRegime, SparsityPrior, HIGH_KAPPA, LARGE_RATIO, LOW_KAPPA,
    SMALL_N,
};
