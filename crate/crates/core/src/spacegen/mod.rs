//! Synthetic feature-space generator.
//!
//! A [`SimConfig`] fixes one point of the seven-hyperparameter manifold
//! (features, rank ratio, eigenvalue dispersion, coefficient distribution,
//! sparsity, SNR and sample size). [`simulate`] runs the full pipeline:
//! eigenvalue spectrum, Haar-random eigenbasis, true coefficients, Gaussian
//! design, response and an 80/20 holdout split.

mod beta;
mod covariance;
mod dataset;
mod export;
mod spectrum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use beta::{generate_beta, normalize_beta, GroundTruth, MAX_BETA_RETRIES};
pub use covariance::{build_covariance, haar_orthogonal, CovarianceModel};
pub use dataset::{sample_dataset, split_holdout, Dataset, TEST_FRACTION};
pub use export::write_dataset_csv;
pub use spectrum::{
    sample_eigenvalues, spectrum_from_draws, target_rank, EigenSpectrum, KAPPA_CAP,
    NEGLIGIBLE_EIGENVALUE,
};

use crate::error::{Error, Result};
use crate::rng::{child_rng, Stream};

/// Eigenvalue dispersion regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dispersion {
    /// Pareto(2) draws, condition number around ten.
    Low,
    /// Log-normal(-2, 2.5) draws, condition number in the 1e4..1e6 band.
    High,
}

impl fmt::Display for Dispersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dispersion::Low => "low",
            Dispersion::High => "high",
        })
    }
}

impl FromStr for Dispersion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(Dispersion::Low),
            "high" => Ok(Dispersion::High),
            other => Err(Error::Parse(format!("unknown dispersion `{other}`"))),
        }
    }
}

/// Distribution of the raw coefficient magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BetaDist {
    /// Gamma(shape, scale 1) magnitudes with random signs.
    Gamma(f64),
    /// Random signs, unit magnitudes.
    Uniform,
}

impl fmt::Display for BetaDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaDist::Gamma(shape) => write!(f, "gamma({shape})"),
            BetaDist::Uniform => f.write_str("uniform"),
        }
    }
}

impl FromStr for BetaDist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "uniform" {
            return Ok(BetaDist::Uniform);
        }
        let inner = t
            .strip_prefix("gamma(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("gamma:"))
            .ok_or_else(|| Error::Parse(format!("unknown beta distribution `{s}`")))?;
        let shape: f64 = inner
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad gamma shape in `{s}`")))?;
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::Parse(format!("gamma shape must be positive in `{s}`")));
        }
        Ok(BetaDist::Gamma(shape))
    }
}

impl TryFrom<String> for BetaDist {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BetaDist> for String {
    fn from(b: BetaDist) -> String {
        b.to_string()
    }
}

pub const PAPER_FEATURES: [usize; 2] = [64, 128];
pub const PAPER_SAMPLE_SIZES: [usize; 4] = [100, 1_000, 10_000, 100_000];
pub const PAPER_SNRS: [f64; 3] = [0.04, 0.2, 1.0];
pub const PAPER_RANK_RATIOS: [f64; 2] = [0.9, 1.0];
pub const PAPER_SPARSITIES: [f64; 2] = [0.0, 0.15];
pub const PAPER_BETA_DISTS: [BetaDist; 5] = [
    BetaDist::Gamma(0.04),
    BetaDist::Gamma(0.2),
    BetaDist::Gamma(1.0),
    BetaDist::Gamma(5.0),
    BetaDist::Uniform,
];

/// One point of the hyperparameter manifold plus the seed of its world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub features_p: usize,
    pub rank_ratio: f64,
    pub dispersion: Dispersion,
    pub beta_dist: BetaDist,
    pub sparsity: f64,
    pub snr: f64,
    pub sample_n: usize,
    pub seed: u64,
}

impl SimConfig {
    /// Checks the free-mode invariants (any positive sizes).
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(format!("{msg} in {}", self.canonical())));
        if self.features_p < 2 {
            return bad(format!("features_p = {} < 2", self.features_p));
        }
        if !(self.rank_ratio > 0.0 && self.rank_ratio <= 1.0) {
            return bad(format!("rank_ratio = {} outside (0, 1]", self.rank_ratio));
        }
        if !(0.0..1.0).contains(&self.sparsity) {
            return bad(format!("sparsity = {} outside [0, 1)", self.sparsity));
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return bad(format!("snr = {} must be positive", self.snr));
        }
        if self.sample_n < 2 {
            return bad(format!("sample_n = {} < 2", self.sample_n));
        }
        if let BetaDist::Gamma(shape) = self.beta_dist {
            if !(shape > 0.0 && shape.is_finite()) {
                return bad(format!("gamma shape = {shape} must be positive"));
            }
        }
        Ok(())
    }

    /// True when every hyperparameter sits on a level of the full `paper` preset.
    pub fn is_paper_grid_point(&self) -> bool {
        PAPER_FEATURES.contains(&self.features_p)
            && PAPER_RANK_RATIOS.contains(&self.rank_ratio)
            && PAPER_BETA_DISTS.contains(&self.beta_dist)
            && PAPER_SPARSITIES.contains(&self.sparsity)
            && PAPER_SNRS.contains(&self.snr)
            && PAPER_SAMPLE_SIZES.contains(&self.sample_n)
    }

    /// Seed-free canonical description, stable across runs and platforms.
    pub fn canonical(&self) -> String {
        format!(
            "p={};rank_ratio={};dispersion={};beta={};sparsity={};snr={};n={}",
            self.features_p,
            self.rank_ratio,
            self.dispersion,
            self.beta_dist,
            self.sparsity,
            self.snr,
            self.sample_n
        )
    }

    pub fn with_seed(&self, seed: u64) -> SimConfig {
        SimConfig { seed, ..self.clone() }
    }
}

/// The seven axes of the configuration grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hyperparameter {
    SampleN,
    Snr,
    BetaDist,
    Dispersion,
    FeaturesP,
    Sparsity,
    RankRatio,
}

impl Hyperparameter {
    pub const ALL: [Hyperparameter; 7] = [
        Hyperparameter::SampleN,
        Hyperparameter::Snr,
        Hyperparameter::BetaDist,
        Hyperparameter::Dispersion,
        Hyperparameter::FeaturesP,
        Hyperparameter::Sparsity,
        Hyperparameter::RankRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Hyperparameter::SampleN => "n",
            Hyperparameter::Snr => "snr",
            Hyperparameter::BetaDist => "beta",
            Hyperparameter::Dispersion => "dispersion",
            Hyperparameter::FeaturesP => "p",
            Hyperparameter::Sparsity => "sparsity",
            Hyperparameter::RankRatio => "rank_ratio",
        }
    }

    /// Level of this axis in `config`, as a label.
    pub fn level(self, config: &SimConfig) -> String {
        match self {
            Hyperparameter::SampleN => config.sample_n.to_string(),
            Hyperparameter::Snr => config.snr.to_string(),
            Hyperparameter::BetaDist => config.beta_dist.to_string(),
            Hyperparameter::Dispersion => config.dispersion.to_string(),
            Hyperparameter::FeaturesP => config.features_p.to_string(),
            Hyperparameter::Sparsity => config.sparsity.to_string(),
            Hyperparameter::RankRatio => config.rank_ratio.to_string(),
        }
    }
}

impl fmt::Display for Hyperparameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Hyperparameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "n" | "sample_n" => Hyperparameter::SampleN,
            "snr" => Hyperparameter::Snr,
            "beta" | "beta_dist" => Hyperparameter::BetaDist,
            "dispersion" | "kappa" => Hyperparameter::Dispersion,
            "p" | "features_p" => Hyperparameter::FeaturesP,
            "sparsity" => Hyperparameter::Sparsity,
            "rank_ratio" | "r/p" => Hyperparameter::RankRatio,
            _ => return Err(Error::Parse(format!("unknown hyperparameter `{s}`"))),
        })
    }
}

/// Everything produced for one seeded world.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: SimConfig,
    pub covariance: CovarianceModel,
    pub truth: GroundTruth,
    pub dataset: Dataset<f64>,
}

/// Runs the whole generator pipeline for `config`, each component on its own
/// child stream of `config.seed`.
pub fn simulate(config: &SimConfig) -> Result<Simulation> {
    config.validate()?;
    let seed = config.seed;
    let spectrum = sample_eigenvalues(
        config.features_p,
        config.rank_ratio,
        config.dispersion,
        &mut child_rng(seed, Stream::Eigenvalues),
    )?;
    let covariance = build_covariance(spectrum, &mut child_rng(seed, Stream::Basis))?;
    let truth = generate_beta(
        config.features_p,
        config.beta_dist,
        config.sparsity,
        &mut child_rng(seed, Stream::Beta),
    )?;
    let (dataset, truth) = sample_dataset(
        &covariance,
        truth,
        config.sample_n,
        config.snr,
        &mut child_rng(seed, Stream::Features),
        &mut child_rng(seed, Stream::Noise),
    )
    .map_err(|e| match e {
        Error::DegenerateSignal { .. } => Error::DegenerateSignal {
            config: format!("{} seed={}", config.canonical(), seed),
        },
        other => other,
    })?;
    let dataset = split_holdout(dataset, &mut child_rng(seed, Stream::Split))?;
    Ok(Simulation { config: config.clone(), covariance, truth, dataset })
}
