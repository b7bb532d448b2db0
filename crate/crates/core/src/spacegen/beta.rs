use ndarray::Array1;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::BetaDist;
use crate::error::{Error, Result};

/// Upper bound on regenerations when a draw sparsifies to the zero vector.
pub const MAX_BETA_RETRIES: usize = 10;

/// True coefficients and the noise level realized for them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub beta: Array1<f64>,
    /// Sorted indices of the non-zero coefficients.
    pub support: Vec<usize>,
    /// Target SNR; zero until a response has been sampled.
    pub snr_target: f64,
    /// Realized signal variance (denominator n); zero until sampled.
    pub signal_sigma2: f64,
    /// Noise variance used for the response; zero until sampled.
    pub noise_sigma2: f64,
    /// How many all-zero draws were discarded.
    pub beta_retries: usize,
}

impl GroundTruth {
    pub fn from_beta(beta: Array1<f64>) -> Self {
        let support = support_of(&beta);
        GroundTruth {
            beta,
            support,
            snr_target: 0.0,
            signal_sigma2: 0.0,
            noise_sigma2: 0.0,
            beta_retries: 0,
        }
    }
}

fn support_of(beta: &Array1<f64>) -> Vec<usize> {
    beta.iter().enumerate().filter(|(_, &b)| b != 0.0).map(|(j, _)| j).collect()
}

/// Rescales `raw` to Euclidean norm `sqrt(p)`; `None` for the zero vector.
pub fn normalize_beta(raw: &Array1<f64>) -> Option<Array1<f64>> {
    let norm = raw.dot(raw).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    let target = (raw.len() as f64).sqrt();
    Some(raw.mapv(|b| b * target / norm))
}

pub fn generate_beta<R: Rng + ?Sized>(
    p: usize,
    dist: BetaDist,
    sparsity: f64,
    rng: &mut R,
) -> Result<GroundTruth> {
    if p == 0 {
        return Err(Error::InvalidConfig("beta needs at least one feature".into()));
    }
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::InvalidConfig(format!("sparsity {sparsity} outside [0, 1)")));
    }
    let zeros = ((sparsity * p as f64) + 1e-9).floor() as usize;
    for attempt in 0..=MAX_BETA_RETRIES {
        let mut raw = draw_raw(p, dist, rng)?;
        if zeros > 0 {
            for j in sample(rng, p, zeros) {
                raw[j] = 0.0;
            }
        }
        if let Some(beta) = normalize_beta(&raw) {
            if attempt > 0 {
                log::warn!("beta draw regenerated {attempt} time(s) after an all-zero vector");
            }
            let mut truth = GroundTruth::from_beta(beta);
            truth.beta_retries = attempt;
            return Ok(truth);
        }
    }
    Err(Error::DegenerateBeta { retries: MAX_BETA_RETRIES })
}

fn draw_raw<R: Rng + ?Sized>(p: usize, dist: BetaDist, rng: &mut R) -> Result<Array1<f64>> {
    let sign = |rng: &mut R| if rng.random::<bool>() { 1.0 } else { -1.0 };
    match dist {
        BetaDist::Uniform => Ok(Array1::from_iter((0..p).map(|_| sign(rng)))),
        BetaDist::Gamma(shape) => {
            let gamma = Gamma::new(shape, 1.0)
                .map_err(|e| Error::InvalidConfig(format!("gamma({shape}): {e}")))?;
            let magnitudes: Vec<f64> = (0..p).map(|_| gamma.sample(rng)).collect();
            let signs: Vec<f64> = (0..p).map(|_| sign(rng)).collect();
            Ok(Array1::from_iter(magnitudes.into_iter().zip(signs).map(|(m, s)| m * s)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{child_rng, Stream};
    use ndarray::array;

    #[test]
    fn normalization_fixed_point() {
        let raw = array![1.0, -1.0, 1.0, -1.0];
        assert_eq!(normalize_beta(&raw).unwrap(), raw);
        assert!(normalize_beta(&array![0.0, 0.0]).is_none());
    }

    #[test]
    fn exact_zero_count() {
        let mut rng = child_rng(1, Stream::Beta);
        let t = generate_beta(128, BetaDist::Uniform, 0.15, &mut rng).unwrap();
        assert_eq!(t.beta.iter().filter(|&&b| b == 0.0).count(), 19);
        assert_eq!(t.support.len(), 128 - 19);
        assert!((t.beta.dot(&t.beta).sqrt() - 128f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn uniform_has_unit_magnitudes() {
        let mut rng = child_rng(2, Stream::Beta);
        let t = generate_beta(32, BetaDist::Uniform, 0.0, &mut rng).unwrap();
        assert!(t.beta.iter().all(|&b| b.abs() == 1.0));
    }

    #[test]
    fn rejects_bad_sparsity() {
        let mut rng = child_rng(2, Stream::Beta);
        assert!(generate_beta(8, BetaDist::Uniform, 1.0, &mut rng).is_err());
        assert!(generate_beta(0, BetaDist::Uniform, 0.0, &mut rng).is_err());
    }
}
