use rand::Rng;
use rand_distr::{Distribution, LogNormal, Pareto};
use serde::{Deserialize, Serialize};

use super::Dispersion;
use crate::error::{Error, Result};

/// Largest admissible ratio between the largest and smallest positive eigenvalue.
pub const KAPPA_CAP: f64 = 1e6;
/// Positive eigenvalues below this are replaced by exact zeros.
pub const NEGLIGIBLE_EIGENVALUE: f64 = 1e-8;

const PARETO_SHAPE: f64 = 2.0;
const LOGNORMAL_MU: f64 = -2.0;
const LOGNORMAL_SIGMA: f64 = 2.5;

/// Spectrum of the feature covariance, sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    pub lambdas: Vec<f64>,
    /// Number of strictly positive eigenvalues.
    pub rank: usize,
    /// Ratio of largest to smallest positive eigenvalue.
    pub kappa: f64,
    /// Sum the positive entries were normalized to (the target rank).
    pub normalization_target: f64,
    /// Sum of the entries after capping and thresholding.
    pub realized_sum: f64,
}

impl EigenSpectrum {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn min_positive(&self) -> Option<f64> {
        self.lambdas.iter().cloned().filter(|&l| l > 0.0).reduce(f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = self.lambdas.windows(2).all(|w| w[0] >= w[1]);
        let positive = self.lambdas.iter().filter(|&&l| l > 0.0).count();
        if !ordered || positive != self.rank || positive == 0 {
            return Err(Error::InvalidConfig("malformed eigenvalue spectrum".into()));
        }
        if self.lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidConfig("spectrum has negative or non-finite entries".into()));
        }
        Ok(())
    }
}

/// Number of non-zero eigenvalues for `p` features at `rank_ratio`: the
/// floor of `rank_ratio * p` (115 of 128 at 0.9), never below one.
pub fn target_rank(p: usize, rank_ratio: f64) -> usize {
    (((rank_ratio * p as f64) + 1e-9).floor() as usize).clamp(1, p)
}

/// Draws a spectrum for the given dispersion regime.
pub fn sample_eigenvalues<R: Rng + ?Sized>(
    p: usize,
    rank_ratio: f64,
    dispersion: Dispersion,
    rng: &mut R,
) -> Result<EigenSpectrum> {
    if p < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 features, got {p}")));
    }
    if !(rank_ratio > 0.0 && rank_ratio <= 1.0) {
        return Err(Error::InvalidConfig(format!("rank_ratio {rank_ratio} outside (0, 1]")));
    }
    let rank = target_rank(p, rank_ratio);
    let raw: Vec<f64> = match dispersion {
        Dispersion::Low => {
            let dist = Pareto::new(1.0, PARETO_SHAPE).expect("valid Pareto parameters");
            (0..rank).map(|_| dist.sample(rng)).collect()
        }
        Dispersion::High => {
            let dist = LogNormal::new(LOGNORMAL_MU, LOGNORMAL_SIGMA).expect("valid log-normal");
            (0..rank).map(|_| dist.sample(rng)).collect()
        }
    };
    spectrum_from_draws(raw, p, rank as f64)
}

/// Deterministic part of spectrum construction: cap the raw draws, normalize
/// them to sum to `target`, cap again, zero negligible entries, zero-pad to
/// `p` and sort in descending order.
pub fn spectrum_from_draws(mut raw: Vec<f64>, p: usize, target: f64) -> Result<EigenSpectrum> {
    if raw.is_empty() || raw.len() > p {
        return Err(Error::InvalidConfig(format!(
            "{} raw eigenvalues for {p} features",
            raw.len()
        )));
    }
    if raw.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidConfig("raw eigenvalues must be positive and finite".into()));
    }
    apply_kappa_cap(&mut raw);
    let sum: f64 = raw.iter().sum();
    raw.iter_mut().for_each(|v| *v *= target / sum);
    apply_kappa_cap(&mut raw);
    for v in raw.iter_mut() {
        if *v < NEGLIGIBLE_EIGENVALUE {
            *v = 0.0;
        }
    }
    raw.resize(p, 0.0);
    raw.sort_by(|a, b| b.total_cmp(a));
    let rank = raw.iter().filter(|&&v| v > 0.0).count();
    let max = raw[0];
    let min_pos = raw.iter().cloned().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min);
    Ok(EigenSpectrum {
        realized_sum: raw.iter().sum(),
        lambdas: raw,
        rank,
        kappa: max / min_pos,
        normalization_target: target,
    })
}

/// Lifts every eigenvalue below `max / KAPPA_CAP` to exactly that floor.
fn apply_kappa_cap(values: &mut [f64]) {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = max / KAPPA_CAP;
    for v in values.iter_mut() {
        if *v < floor {
            *v = floor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{child_rng, Stream};

    #[test]
    fn cap_lifts_tiny_draw() {
        let s = spectrum_from_draws(vec![1.0, 1e-9], 2, 2.0).unwrap();
        let max = s.lambdas[0];
        let min = s.lambdas[1];
        assert!((min - max * 1e-6).abs() <= 1e-18 * max.max(1.0));
        assert!(s.kappa <= KAPPA_CAP * (1.0 + 1e-12));
        assert!((s.realized_sum - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_spectrum_is_zero_padded() {
        let mut rng = child_rng(11, Stream::Eigenvalues);
        let s = sample_eigenvalues(128, 0.9, Dispersion::High, &mut rng).unwrap();
        assert_eq!(s.len(), 128);
        assert_eq!(s.rank, 115);
        assert!(s.lambdas[115..].iter().all(|&v| v == 0.0));
        assert!(s.lambdas.windows(2).all(|w| w[0] >= w[1]));
        assert!((s.realized_sum - 115.0).abs() / 115.0 < 1e-6);
        s.validate().unwrap();
    }

    #[test]
    fn target_rank_floors() {
        assert_eq!(target_rank(128, 0.9), 115);
        assert_eq!(target_rank(64, 0.9), 57);
        assert_eq!(target_rank(64, 1.0), 64);
        assert_eq!(target_rank(10, 0.7), 7);
        assert_eq!(target_rank(4, 0.01), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = child_rng(1, Stream::Eigenvalues);
        assert!(sample_eigenvalues(1, 1.0, Dispersion::Low, &mut rng).is_err());
        assert!(sample_eigenvalues(8, 0.0, Dispersion::Low, &mut rng).is_err());
        assert!(spectrum_from_draws(vec![1.0, -1.0], 2, 2.0).is_err());
    }
}
