mod common;

use proptest::prelude::*;

use regbench::analysis::{omega_squared, two_way_interaction_f};

use common::{interaction_oracle, omega2_literal};

proptest! {
    #[test]
    fn omega_squared_matches_the_textbook_formula(
        k in 2usize..6,
        m in 2usize..7,
        data in prop::collection::vec(-10.0f64..10.0, 36),
    ) {
        let groups: Vec<usize> = (0..k * m).map(|i| i % k).collect();
        let values = &data[..k * m];
        let got = omega_squared(values, &groups).unwrap().omega2;
        prop_assert!((got - omega2_literal(values, &groups)).abs() < 1e-10);
    }

    #[test]
    fn omega_squared_ignores_affine_rescaling(
        data in prop::collection::vec(-10.0f64..10.0, 12),
        a in 0.1f64..10.0,
        b in -5.0f64..5.0,
    ) {
        let groups: Vec<usize> = (0..12).map(|i| i % 3).collect();
        let scaled: Vec<f64> = data.iter().map(|v| a * v + b).collect();
        let w0 = omega_squared(&data, &groups).unwrap().omega2;
        let w1 = omega_squared(&scaled, &groups).unwrap().omega2;
        prop_assert!((w0 - w1).abs() < 1e-9);
    }

    #[test]
    fn interaction_f_matches_regression_oracle(
        ra in 2usize..4,
        rb in 2usize..4,
        data in prop::collection::vec(-3.0f64..3.0, 48),
    ) {
        let m = 3;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for i in 0..ra {
            for j in 0..rb {
                for _ in 0..m {
                    a.push(i);
                    b.push(j);
                }
            }
        }
        let values = &data[..a.len()];
        let got = two_way_interaction_f(values, &a, &b).unwrap();
        let (ss_ab, ss_err, f) = interaction_oracle(values, &a, &b);
        prop_assert!((got.ss_interaction - ss_ab).abs() <= 1e-8 * ss_ab.max(1e-12));
        prop_assert!((got.ss_error - ss_err).abs() <= 1e-8 * ss_err.max(1e-12));
        prop_assert!((got.f - f).abs() <= 1e-8 * f.max(1e-12));
    }
}

#[test]
fn single_group_is_rejected() {
    assert!(omega_squared(&[1.0, 2.0, 3.0], &[0, 0, 0]).is_err());
}
