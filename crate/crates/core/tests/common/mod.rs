//! Shared fixtures and reference implementations for the integration tests.
#![allow(dead_code)]

use logagg::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal covariates, labels drawn from the logistic model at `theta`.
pub fn logistic_data(n: usize, theta: &[f64], seed: u64) -> Dataset {
    let p = theta.len();
    let mut r = rng(seed);
    let x: Vec<f64> = (0..n * p).map(|_| r.sample(StandardNormal)).collect();
    let y = (0..n)
        .map(|i| {
            let z: f64 = (0..p).map(|j| theta[j] * x[i * p + j]).sum();
            u8::from(r.random::<f64>() < 1.0 / (1.0 + (-z).exp()))
        })
        .collect();
    Dataset::with_default_names(x, y, p).unwrap()
}

/// Labels independent of the covariates.
pub fn noise_data(n: usize, p: usize, seed: u64) -> Dataset {
    logistic_data(n, &vec![0.0; p], seed)
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = s + v;
        c += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
        s = t;
    }
    s + c
}

/// The textbook formula with no overflow guard.
pub fn naive_loglik(theta: &[f64], data: &Dataset) -> f64 {
    compensated_sum((0..data.n()).map(|i| {
        let z: f64 = compensated_sum(data.row(i).iter().zip(theta).map(|(x, t)| x * t));
        data.label(i) * z - (1.0 + z.exp()).ln()
    }))
}

/// Log-likelihood of `intercept + theta·x` on `data`, naive formula.
pub fn naive_loglik_with_intercept(intercept: f64, theta: &[f64], data: &Dataset) -> f64 {
    compensated_sum((0..data.n()).map(|i| {
        let z = intercept + compensated_sum(data.row(i).iter().zip(theta).map(|(x, t)| x * t));
        data.label(i) * z - (1.0 + z.exp()).ln()
    }))
}

/// One-sample Kolmogorov–Smirnov statistic against Uniform(0, 1).
pub fn ks_uniform(mut sample: Vec<f64>) -> f64 {
    sample.sort_by(f64::total_cmp);
    let m = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &u)| ((i + 1) as f64 / m - u).max(u - i as f64 / m))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic for `m` draws.
pub fn ks_critical_1pct(m: usize) -> f64 {
    1.628 / (m as f64).sqrt()
}

/// Uniform point on the probability simplex (normalized exponentials).
pub fn simplex_point(r: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}
