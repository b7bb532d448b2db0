use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::{CvPlan, Method, SolverOptions, PAPER_ALPHA_GRID, PAPER_L1_GRID};
use crate::spacegen::{
    BetaDist, Dispersion, SimConfig, PAPER_BETA_DISTS, PAPER_FEATURES, PAPER_RANK_RATIOS,
    PAPER_SAMPLE_SIZES, PAPER_SNRS, PAPER_SPARSITIES,
};

/// Cross-validation grids used by every cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvSettings {
    pub alpha_grid: Vec<f64>,
    pub l1_grid: Vec<f64>,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for CvSettings {
    fn default() -> Self {
        let s = SolverOptions::<f64>::default();
        CvSettings {
            alpha_grid: PAPER_ALPHA_GRID.to_vec(),
            l1_grid: PAPER_L1_GRID.to_vec(),
            tol: s.tol,
            max_sweeps: s.max_sweeps,
        }
    }
}

impl CvSettings {
    pub fn plan(&self, sample_n: usize) -> CvPlan {
        CvPlan { alpha_grid: self.alpha_grid.clone(), l1_grid: self.l1_grid.clone(), ..CvPlan::paper(sample_n) }
    }

    pub fn solver(&self) -> SolverOptions<f64> {
        SolverOptions { tol: self.tol, max_sweeps: self.max_sweeps, ..SolverOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Paper,
    Desk,
    Custom,
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" => Ok(Preset::Paper),
            "desk" => Ok(Preset::Desk),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::Parse(format!("unknown preset `{other}`"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Paper => "paper",
            Preset::Desk => "desk",
            Preset::Custom => "custom",
        })
    }
}

/// Levels of every hyperparameter plus seeds and methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub features_p: Vec<usize>,
    pub rank_ratios: Vec<f64>,
    pub dispersions: Vec<Dispersion>,
    pub beta_dists: Vec<BetaDist>,
    pub sparsities: Vec<f64>,
    pub snrs: Vec<f64>,
    pub sample_ns: Vec<usize>,
    pub seeds_per_config: usize,
    /// Seeds are `base_seed .. base_seed + seeds_per_config`.
    pub base_seed: u64,
    pub methods: Vec<Method>,
    pub cv: CvSettings,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::paper()
    }
}

impl GridSpec {
    /// The full 960-configuration grid with 35 seeds and the four frameworks.
    pub fn paper() -> Self {
        GridSpec {
            features_p: PAPER_FEATURES.to_vec(),
            rank_ratios: PAPER_RANK_RATIOS.to_vec(),
            dispersions: vec![Dispersion::Low, Dispersion::High],
            beta_dists: PAPER_BETA_DISTS.to_vec(),
            sparsities: PAPER_SPARSITIES.to_vec(),
            snrs: PAPER_SNRS.to_vec(),
            sample_ns: PAPER_SAMPLE_SIZES.to_vec(),
            seeds_per_config: 35,
            base_seed: 0,
            methods: Method::FRAMEWORKS.to_vec(),
            cv: CvSettings::default(),
        }
    }

    /// Laptop-sized grid: fewer features and sample sizes, five seeds.
    pub fn desk() -> Self {
        GridSpec {
            features_p: vec![16, 32],
            sample_ns: vec![100, 1_000, 2_500],
            seeds_per_config: 5,
            ..GridSpec::paper()
        }
    }

    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Paper | Preset::Custom => GridSpec::paper(),
            Preset::Desk => GridSpec::desk(),
        }
    }

    pub fn config_count(&self) -> usize {
        self.features_p.len()
            * self.rank_ratios.len()
            * self.dispersions.len()
            * self.beta_dists.len()
            * self.sparsities.len()
            * self.snrs.len()
            * self.sample_ns.len()
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.seeds_per_config as u64).map(move |s| self.base_seed + s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.config_count() == 0 {
            return Err(Error::InvalidConfig("every hyperparameter needs at least one level".into()));
        }
        if self.seeds_per_config == 0 {
            return Err(Error::InvalidConfig("seeds_per_config must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods selected".into()));
        }
        self.cv.plan(100).validate()?;
        for c in enumerate_grid(self) {
            c.validate()?;
        }
        Ok(())
    }
}

/// Cartesian product of the levels, varying the last axis (`n`) fastest in
/// the order p, rank ratio, dispersion, beta, sparsity, SNR, n. The `seed`
/// field of every returned config is 0.
pub fn enumerate_grid(spec: &GridSpec) -> Vec<SimConfig> {
    let mut out = Vec::with_capacity(spec.config_count());
    for &features_p in &spec.features_p {
        for &rank_ratio in &spec.rank_ratios {
            for &dispersion in &spec.dispersions {
                for &beta_dist in &spec.beta_dists {
                    for &sparsity in &spec.sparsities {
                        for &snr in &spec.snrs {
                            for &sample_n in &spec.sample_ns {
                                out.push(SimConfig {
                                    features_p,
                                    rank_ratio,
                                    dispersion,
                                    beta_dist,
                                    sparsity,
                                    snr,
                                    sample_n,
                                    seed: 0,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Identity of one planned evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunKey {
    pub config: String,
    pub seed: u64,
    pub method: Method,
}

impl fmt::Display for RunKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} seed={} method={}", self.config, self.seed, self.method)
    }
}

pub fn planned_runs(spec: &GridSpec) -> Vec<RunKey> {
    let mut out = Vec::new();
    for c in enumerate_grid(spec) {
        let canonical = c.canonical();
        for seed in spec.seeds() {
            for &method in &spec.methods {
                out.push(RunKey { config: canonical.clone(), seed, method });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_cardinalities() {
        let g = GridSpec::paper();
        assert_eq!(enumerate_grid(&g).len(), 960);
        assert_eq!(planned_runs(&g).len(), 134_400);
    }

    #[test]
    fn desk_cardinality() {
        assert_eq!(enumerate_grid(&GridSpec::desk()).len(), 720);
        let small = GridSpec { features_p: vec![16], sample_ns: vec![100, 1000], ..GridSpec::paper() };
        assert_eq!(enumerate_grid(&small).len(), 240);
    }

    #[test]
    fn order_is_stable() {
        let g = GridSpec::desk();
        let a: Vec<String> = enumerate_grid(&g).iter().map(SimConfig::canonical).collect();
        let b: Vec<String> = enumerate_grid(&g).iter().map(SimConfig::canonical).collect();
        assert_eq!(a, b);
        assert_eq!(a[0], "p=16;rank_ratio=0.9;dispersion=low;beta=gamma(0.04);sparsity=0;snr=0.04;n=100");
        assert!(a[1].ends_with("n=1000"));
    }
}
