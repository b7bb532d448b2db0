use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use super::EigenSpectrum;
use crate::error::Result;
use crate::linalg::qr_mgs;

/// Feature covariance `basis_q * diag(lambdas) * basis_q^T`.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    pub basis_q: Array2<f64>,
    pub spectrum: EigenSpectrum,
}

impl CovarianceModel {
    pub fn dim(&self) -> usize {
        self.basis_q.nrows()
    }

    pub fn lambdas(&self) -> Array1<f64> {
        Array1::from(self.spectrum.lambdas.clone())
    }

    pub fn sigma(&self) -> Array2<f64> {
        let scaled = &self.basis_q * &self.lambdas();
        let sigma = scaled.dot(&self.basis_q.t());
        // Symmetrize away rounding asymmetry.
        (&sigma + &sigma.t()) * 0.5
    }

    /// `diag(sqrt(lambda)) * Q^T`, so that `Z * factor` has covariance sigma
    /// for `Z` with i.i.d. standard normal entries.
    pub fn row_factor(&self) -> Array2<f64> {
        let roots = self.lambdas().mapv(f64::sqrt);
        let mut factor = self.basis_q.t().to_owned();
        for (mut row, r) in factor.rows_mut().into_iter().zip(roots.iter()) {
            row.mapv_inplace(|v| v * r);
        }
        factor
    }

    /// Inverse covariance for a full-rank spectrum.
    pub fn precision(&self) -> Option<Array2<f64>> {
        if self.spectrum.rank < self.dim() {
            return None;
        }
        let inv = self.lambdas().mapv(|l| 1.0 / l);
        let scaled = &self.basis_q * &inv;
        let prec = scaled.dot(&self.basis_q.t());
        Some((&prec + &prec.t()) * 0.5)
    }
}

/// Haar-distributed orthogonal matrix: Gram-Schmidt of a square standard
/// normal draw, which fixes the signs so that R has a positive diagonal.
pub fn haar_orthogonal<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Array2<f64> {
    loop {
        let z = Array2::from_shape_simple_fn((p, p), || rng.sample::<f64, _>(StandardNormal));
        let (q, r) = qr_mgs(z.view());
        if r.diag().iter().all(|&d| d > 0.0) {
            return q;
        }
    }
}

pub fn build_covariance<R: Rng + ?Sized>(
    spectrum: EigenSpectrum,
    rng: &mut R,
) -> Result<CovarianceModel> {
    spectrum.validate()?;
    let basis_q = haar_orthogonal(spectrum.len(), rng);
    Ok(CovarianceModel { basis_q, spectrum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{child_rng, Stream};
    use crate::spacegen::spectrum_from_draws;

    #[test]
    fn unit_spectrum_gives_identity() {
        let s = spectrum_from_draws(vec![1.0; 6], 6, 6.0).unwrap();
        let cov = build_covariance(s, &mut child_rng(5, Stream::Basis)).unwrap();
        let sigma = cov.sigma();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((sigma[[i, j]] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_is_orthonormal_and_trace_matches() {
        let draws: Vec<f64> = (1..=12).map(|k| (k * k) as f64).collect();
        let s = spectrum_from_draws(draws, 12, 12.0).unwrap();
        let total: f64 = s.lambdas.iter().sum();
        let cov = build_covariance(s, &mut child_rng(9, Stream::Basis)).unwrap();
        let qtq = cov.basis_q.t().dot(&cov.basis_q);
        for i in 0..12 {
            for j in 0..12 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((qtq[[i, j]] - want).abs() < 1e-10);
            }
        }
        let sigma = cov.sigma();
        assert!((sigma.diag().sum() - total).abs() < 1e-9);
        let prec = cov.precision().unwrap();
        let eye = sigma.dot(&prec);
        for i in 0..12 {
            assert!((eye[[i, i]] - 1.0).abs() < 1e-8);
        }
    }
}
