use ndarray::{Array1, Array2, Axis};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use super::{CovarianceModel, GroundTruth};
use crate::error::{Error, Result};
use crate::Float;

/// Fraction of observations held out for testing.
pub const TEST_FRACTION: f64 = 0.2;

/// Design matrix, response and (once split) the holdout partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F> {
    pub x: Array2<F>,
    pub y: Array1<F>,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

impl<F: Float> Dataset<F> {
    pub fn new(x: Array2<F>, y: Array1<F>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "x has {} rows, y has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        Ok(Dataset { x, y, train_idx: Vec::new(), test_idx: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn is_split(&self) -> bool {
        !self.test_idx.is_empty()
    }

    pub fn train_x(&self) -> Array2<F> {
        self.x.select(Axis(0), &self.train_idx)
    }

    pub fn train_y(&self) -> Array1<F> {
        self.y.select(Axis(0), &self.train_idx)
    }

    pub fn test_x(&self) -> Array2<F> {
        self.x.select(Axis(0), &self.test_idx)
    }

    pub fn test_y(&self) -> Array1<F> {
        self.y.select(Axis(0), &self.test_idx)
    }

    /// SHA-256 over the shape, the f64 bit patterns of `x` and `y`, and the
    /// partition, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n() as u64).to_le_bytes());
        h.update((self.p() as u64).to_le_bytes());
        for v in self.x.iter().chain(self.y.iter()) {
            h.update(v.to_f64_lossy().to_bits().to_le_bytes());
        }
        h.update(b"train");
        for &i in &self.train_idx {
            h.update((i as u64).to_le_bytes());
        }
        h.update(b"test");
        for &i in &self.test_idx {
            h.update((i as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Draws `X = Z diag(sqrt(lambda)) Q^T` and `y = X beta + eps`, with the noise
/// variance set to the realized signal variance divided by `snr`.
pub fn sample_dataset<F: Float, R: Rng + ?Sized>(
    cov: &CovarianceModel,
    mut truth: GroundTruth,
    n: usize,
    snr: f64,
    features_rng: &mut R,
    noise_rng: &mut R,
) -> Result<(Dataset<F>, GroundTruth)> {
    let p = cov.dim();
    if n < 2 {
        return Err(Error::InvalidConfig(format!("sample size {n} < 2")));
    }
    if truth.beta.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} entries for {p} features",
            truth.beta.len()
        )));
    }
    if !(snr > 0.0 && snr.is_finite()) {
        return Err(Error::InvalidConfig(format!("snr {snr} must be positive")));
    }
    let z = Array2::from_shape_simple_fn((n, p), || features_rng.sample::<f64, _>(StandardNormal));
    let x64 = z.dot(&cov.row_factor());
    let signal = x64.dot(&truth.beta);
    let mean = signal.sum() / n as f64;
    let signal_var = signal.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64;
    if !(signal_var > 0.0) {
        return Err(Error::DegenerateSignal { config: format!("n={n} snr={snr}") });
    }
    let noise_var = signal_var / snr;
    let sd = noise_var.sqrt();
    let y64 = Array1::from_iter(
        signal.iter().map(|s| s + sd * noise_rng.sample::<f64, _>(StandardNormal)),
    );
    truth.snr_target = snr;
    truth.signal_sigma2 = signal_var;
    truth.noise_sigma2 = noise_var;
    let dataset = Dataset::new(x64.mapv(F::cst), y64.mapv(F::cst))?;
    Ok((dataset, truth))
}

/// Uniformly random 80/20 partition; both index lists come back sorted.
pub fn split_holdout<F: Float, R: Rng + ?Sized>(
    mut dataset: Dataset<F>,
    rng: &mut R,
) -> Result<Dataset<F>> {
    let n = dataset.n();
    if n < 5 {
        return Err(Error::SplitInfeasible { n });
    }
    let n_test = (TEST_FRACTION * n as f64).round() as usize;
    let mut test: Vec<usize> = sample(rng, n, n_test).into_vec();
    test.sort_unstable();
    let mut is_test = vec![false; n];
    test.iter().for_each(|&i| is_test[i] = true);
    dataset.train_idx = (0..n).filter(|&i| !is_test[i]).collect();
    dataset.test_idx = test;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{child_rng, Stream};
    use crate::spacegen::{build_covariance, spectrum_from_draws};
    use ndarray::array;

    fn toy(n: usize) -> Dataset<f64> {
        Dataset::new(Array2::zeros((n, 2)), Array1::zeros(n)).unwrap()
    }

    #[test]
    fn split_sizes() {
        let d = split_holdout(toy(100), &mut child_rng(1, Stream::Split)).unwrap();
        assert_eq!((d.test_idx.len(), d.train_idx.len()), (20, 80));
        let d = split_holdout(toy(10), &mut child_rng(1, Stream::Split)).unwrap();
        assert_eq!(d.test_idx.len(), 2);
        assert!(matches!(
            split_holdout(toy(4), &mut child_rng(1, Stream::Split)),
            Err(Error::SplitInfeasible { n: 4 })
        ));
    }

    #[test]
    fn split_is_partition() {
        let d = split_holdout(toy(57), &mut child_rng(3, Stream::Split)).unwrap();
        let mut all: Vec<usize> = d.train_idx.iter().chain(&d.test_idx).cloned().collect();
        all.sort_unstable();
        assert_eq!(all, (0..57).collect::<Vec<_>>());
    }

    #[test]
    fn snr_one_matches_signal_variance() {
        let s = spectrum_from_draws(vec![1.0; 4], 4, 4.0).unwrap();
        let cov = build_covariance(s, &mut child_rng(0, Stream::Basis)).unwrap();
        let truth = GroundTruth::from_beta(array![1.0, -1.0, 1.0, -1.0]);
        let (_, t) = sample_dataset::<f64, _>(
            &cov,
            truth,
            50,
            1.0,
            &mut child_rng(0, Stream::Features),
            &mut child_rng(0, Stream::Noise),
        )
        .unwrap();
        assert_eq!(t.noise_sigma2, t.signal_sigma2);
    }

    #[test]
    fn zero_beta_is_degenerate() {
        let s = spectrum_from_draws(vec![1.0; 3], 3, 3.0).unwrap();
        let cov = build_covariance(s, &mut child_rng(0, Stream::Basis)).unwrap();
        let truth = GroundTruth::from_beta(Array1::zeros(3));
        let err = sample_dataset::<f64, _>(
            &cov,
            truth,
            20,
            1.0,
            &mut child_rng(0, Stream::Features),
            &mut child_rng(0, Stream::Noise),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateSignal { .. }));
    }
}
