use ndarray::Array2;
use proptest::prelude::*;

use regbench::spacegen::{
    simulate, PAPER_BETA_DISTS, PAPER_FEATURES, PAPER_RANK_RATIOS, PAPER_SNRS, PAPER_SPARSITIES,
};
use regbench::{Dispersion, SimConfig};

fn config(seed: u64) -> SimConfig {
    SimConfig {
        features_p: 16,
        rank_ratio: 0.8,
        dispersion: Dispersion::High,
        beta_dist: PAPER_BETA_DISTS[0],
        sparsity: 0.15,
        snr: 0.2,
        sample_n: 200,
        seed,
    }
}

#[test]
fn simulation_is_a_function_of_the_config() {
    let a = simulate(&config(3)).unwrap();
    let b = simulate(&config(3)).unwrap();
    assert_eq!(a.dataset.content_hash(), b.dataset.content_hash());
    assert_eq!(a.truth.beta, b.truth.beta);
    let c = simulate(&config(4)).unwrap();
    assert_ne!(a.dataset.content_hash(), c.dataset.content_hash());
}

#[test]
fn holdout_split_partitions_rows() {
    let sim = simulate(&config(5)).unwrap();
    let d = &sim.dataset;
    assert_eq!(d.train_idx.len(), 160);
    assert_eq!(d.test_idx.len(), 40);
    let mut all: Vec<usize> = d.train_idx.iter().chain(&d.test_idx).copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..200).collect::<Vec<_>>());
}

#[test]
fn rank_ratio_sets_the_covariance_rank() {
    let sim = simulate(&config(6)).unwrap();
    let spec = &sim.covariance.spectrum;
    assert_eq!(spec.rank, (0.8f64 * 16.0).floor() as usize);
    assert!(sim.covariance.precision().is_none());
    let q = &sim.covariance.basis_q;
    let qtq: Array2<f64> = q.t().dot(q);
    for i in 0..16 {
        for j in 0..16 {
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((qtq[[i, j]] - e).abs() < 1e-10);
        }
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let mut c = config(1);
    c.snr = 0.0;
    assert!(simulate(&c).is_err());
    let mut c = config(1);
    c.sparsity = 1.0;
    assert!(simulate(&c).is_err());
    let mut c = config(1);
    c.sample_n = 1;
    assert!(simulate(&c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ground_truth_invariants_hold_on_the_grid(
        seed in 0u64..1_000_000,
        pi in 0usize..2, ri in 0usize..2, di in 0usize..2, bi in 0usize..5, si in 0usize..2, ti in 0usize..3,
    ) {
        let c = SimConfig {
            features_p: PAPER_FEATURES[pi],
            rank_ratio: PAPER_RANK_RATIOS[ri],
            dispersion: [Dispersion::Low, Dispersion::High][di],
            beta_dist: PAPER_BETA_DISTS[bi],
            sparsity: PAPER_SPARSITIES[si],
            snr: PAPER_SNRS[ti],
            sample_n: 100,
            seed,
        };
        let sim = simulate(&c).unwrap();
        let p = c.features_p as f64;
        prop_assert!((sim.truth.beta.dot(&sim.truth.beta) - p).abs() < 1e-8);
        prop_assert!(sim.covariance.spectrum.kappa <= 1e6 * (1.0 + 1e-9));
        prop_assert_eq!(sim.truth.support.len(), c.features_p - (c.sparsity * p + 1e-9).floor() as usize);
        prop_assert!((sim.truth.signal_sigma2 / sim.truth.noise_sigma2 - c.snr).abs() < 1e-9 * c.snr);
        prop_assert!(sim.dataset.x.iter().chain(sim.dataset.y.iter()).all(|v| v.is_finite()));
    }
}
