//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

/// Correlated design (`Z * M` with a random mixing matrix) and a noisy
/// linear response with a few zero coefficients.
pub fn random_problem<R: Rng>(rng: &mut R, n: usize, p: usize) -> (Array2<f64>, Array1<f64>) {
    let z = Array2::from_shape_simple_fn((n, p), || rng.sample::<f64, _>(StandardNormal));
    let mut mix = Array2::<f64>::eye(p);
    for v in mix.iter_mut() {
        *v += 0.3 * rng.sample::<f64, _>(StandardNormal);
    }
    let x = z.dot(&mix) + rng.random_range(-1.0..1.0);
    let beta = Array1::from_shape_fn(p, |_| {
        if rng.random_bool(0.3) { 0.0 } else { rng.random_range(-2.0..2.0) }
    });
    let noise = Array1::from_shape_simple_fn(n, || rng.sample::<f64, _>(StandardNormal));
    let y = x.dot(&beta) + noise + 0.5;
    (x, y)
}

/// `(1/2n)||y - b - Xw||^2 + alpha*rho*||w||_1 + alpha*(1-rho)/2*||w||^2`.
pub fn enet_objective(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    intercept: f64,
    w: ArrayView1<f64>,
    alpha: f64,
    rho: f64,
) -> f64 {
    let n = x.nrows() as f64;
    let r = &y - &(x.dot(&w) + intercept);
    r.dot(&r) / (2.0 * n)
        + alpha * rho * w.iter().map(|v| v.abs()).sum::<f64>()
        + 0.5 * alpha * (1.0 - rho) * w.dot(&w)
}

fn soft(z: f64, t: f64) -> f64 {
    z.signum() * (z.abs() - t).max(0.0)
}

/// Elastic net by accelerated proximal gradient (FISTA with gradient
/// restart) on centered data. Returns `(intercept, coefficients)`.
pub fn prox_grad_oracle(x: ArrayView2<f64>, y: ArrayView1<f64>, alpha: f64, rho: f64) -> (f64, Array1<f64>) {
    let (n, p) = x.dim();
    let xm = x.mean_axis(Axis(0)).unwrap();
    let ym = y.mean().unwrap();
    let xc = &x - &xm;
    let yc = y.mapv(|v| v - ym);
    let g = xc.t().dot(&xc) / n as f64;
    let c = xc.t().dot(&yc) / n as f64;
    let gm = DMatrix::from_fn(p, p, |i, j| g[[i, j]]);
    let lip = gm.symmetric_eigenvalues().max() + alpha * (1.0 - rho);
    let step = 1.0 / lip.max(1e-300);
    let l1 = alpha * rho;
    let l2 = alpha * (1.0 - rho);

    let mut w = Array1::<f64>::zeros(p);
    let mut v = w.clone();
    let mut t = 1.0f64;
    for _ in 0..2_000_000 {
        let grad = g.dot(&v) - &c + &(v.mapv(|e| e * l2));
        let next = Array1::from_shape_fn(p, |j| soft(v[j] - step * grad[j], step * l1));
        let delta = &next - &w;
        let moved = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        // Restart momentum when it points uphill.
        if (&v - &next).dot(&delta) > 0.0 {
            t = 1.0;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        v = &next + &(delta.mapv(|d| d * (t - 1.0) / t_next));
        t = t_next;
        w = next;
        if moved <= 1e-15 * w.iter().fold(1.0f64, |m, e| m.max(e.abs())) {
            break;
        }
    }
    let intercept = ym - xm.dot(&w);
    (intercept, w)
}

/// omega^2 straight from its definition for a one-way layout.
pub fn omega2_literal(values: &[f64], groups: &[usize]) -> f64 {
    let mut by: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (v, g) in values.iter().zip(groups) {
        by.entry(*g).or_default().push(*v);
    }
    let big_n = values.len() as f64;
    let k = by.len() as f64;
    let grand = values.iter().sum::<f64>() / big_n;
    let mut ss_effect = 0.0;
    let mut ss_within = 0.0;
    for vals in by.values() {
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        ss_effect += vals.len() as f64 * (m - grand) * (m - grand);
        ss_within += vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    }
    let ss_total: f64 = values.iter().map(|v| (v - grand) * (v - grand)).sum();
    let ms_error = ss_within / (big_n - k);
    (ss_effect - (k - 1.0) * ms_error) / (ss_total + ms_error)
}

fn rss(design: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let svd = design.clone().svd(true, true);
    let coef = svd.solve(y, 1e-12).unwrap();
    let r = y - design * coef;
    r.dot(&r)
}

/// Interaction sum of squares and F of a two-way layout from nested
/// least-squares fits: additive model versus the full cell-means model.
pub fn interaction_oracle(values: &[f64], a: &[usize], b: &[usize]) -> (f64, f64, f64) {
    let n = values.len();
    let ra = a.iter().max().unwrap() + 1;
    let rb = b.iter().max().unwrap() + 1;
    let y = DVector::from_column_slice(values);
    let additive = DMatrix::from_fn(n, 1 + (ra - 1) + (rb - 1), |i, j| {
        if j == 0 {
            1.0
        } else if j < ra {
            (a[i] == j) as u8 as f64
        } else {
            (b[i] == j - ra + 1) as u8 as f64
        }
    });
    let full = DMatrix::from_fn(n, ra * rb, |i, j| (a[i] * rb + b[i] == j) as u8 as f64);
    let rss_add = rss(&additive, &y);
    let rss_full = rss(&full, &y);
    let ss_ab = rss_add - rss_full;
    let df_ab = ((ra - 1) * (rb - 1)) as f64;
    let df_err = (n - ra * rb) as f64;
    (ss_ab, rss_full, (ss_ab / df_ab) / (rss_full / df_err))
}
