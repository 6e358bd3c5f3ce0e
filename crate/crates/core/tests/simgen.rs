mod common;

use logagg::glm::sigmoid;
use logagg::simgen::{gen_covariates, gen_response, simulate, true_theta, Covariates, CovarianceModel, ScenarioSpec, TrueCoefficients};
use nalgebra::DMatrix;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn sample_cov(x: &Covariates, cols: usize) -> DMatrix<f64> {
    let n = x.n as f64;
    let mean: Vec<f64> = (0..cols).map(|j| (0..x.n).map(|i| x.row(i)[j]).sum::<f64>() / n).collect();
    DMatrix::from_fn(cols, cols, |a, b| {
        (0..x.n).map(|i| (x.row(i)[a] - mean[a]) * (x.row(i)[b] - mean[b])).sum::<f64>() / (n - 1.0)
    })
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

#[test]
fn independent_covariance_near_identity() {
    let x = gen_covariates(&ScenarioSpec::new(CovarianceModel::Independent, 1000, 10, 3)).unwrap();
    let c = sample_cov(&x, 10);
    assert!(max_abs(&(c - DMatrix::identity(10, 10))) < 0.15);
}

fn ar1_block_sample() -> (Covariates, ScenarioSpec) {
    let mut spec = ScenarioSpec::new(CovarianceModel::ar1(), 5000, 60, 17);
    spec.block = 50;
    (gen_covariates(&spec).unwrap(), spec)
}

#[test]
fn ar1_sample_precision_is_banded() {
    let (x, _) = ar1_block_sample();
    let prec = sample_cov(&x, 50).try_inverse().unwrap();
    for a in 0..50usize {
        for b in 0..50 {
            if a.abs_diff(b) > 1 {
                assert!(prec[(a, b)].abs() < 0.1, "({a},{b}) = {}", prec[(a, b)]);
            }
        }
    }
}

#[test]
fn ar1_covariance_matches_inverse_precision() {
    let (x, spec) = ar1_block_sample();
    let population = spec.model.precision(50).try_inverse().unwrap();
    assert!(max_abs(&(sample_cov(&x, 50) - population)) < 0.1);
    // the trailing columns stay independent of the block
    let full = sample_cov(&x, 60);
    for a in 50..60 {
        for b in 0..60 {
            let target = if a == b { 1.0 } else { 0.0 };
            assert!((full[(a, b)] - target).abs() < 0.1);
        }
    }
}

#[test]
fn ar2_band_precision() {
    let m = CovarianceModel::ar2().precision(6);
    assert_eq!((m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(0, 3)]), (1.0, 0.3, 0.15, 0.0));
    let x = gen_covariates(&ScenarioSpec::new(CovarianceModel::ar2(), 4000, 100, 1)).unwrap();
    let prec = sample_cov(&x, 100).try_inverse().unwrap();
    assert!((prec[(10, 11)] - 0.3).abs() < 0.1 && (prec[(10, 12)] - 0.15).abs() < 0.1);
}

#[test]
fn independent_marginals_are_standard_normal() {
    let x = gen_covariates(&ScenarioSpec::new(CovarianceModel::Independent, 5000, 6, 99)).unwrap();
    let normal = Normal::standard();
    let crit = 1.949 / (5000f64).sqrt();
    for j in 0..6 {
        let u: Vec<f64> = (0..x.n).map(|i| normal.cdf(x.row(i)[j])).collect();
        let ks = common::ks_uniform(u);
        assert!(ks < crit, "column {j}: KS {ks}");
    }
}

#[test]
fn fair_coin_labels() {
    let x = gen_covariates(&ScenarioSpec::new(CovarianceModel::Independent, 10_000, 5, 4)).unwrap();
    let zero = TrueCoefficients { theta: vec![0.0; 5], support: vec![] };
    let y = gen_response(&x, &zero, 5).unwrap();
    let mean = y.iter().map(|&v| f64::from(v)).sum::<f64>() / 1e4;
    assert!((mean - 0.5).abs() < 0.02);
}

#[test]
fn saturated_predictor_gives_ones() {
    let x = Covariates { n: 2000, p: 5, values: vec![2.0; 10_000] };
    let y = gen_response(&x, &true_theta(5).unwrap(), 6).unwrap();
    assert!(y.iter().all(|&v| v == 1));
    assert!(1.0 - sigmoid(20.0) < 1e-4);
}

#[test]
fn binned_calibration() {
    let spec = ScenarioSpec::new(CovarianceModel::Independent, 200_000, 5, 8);
    let truth = true_theta(5).unwrap();
    let d = simulate(&spec, &truth).unwrap();
    let (mut hit, mut tot) = (0.0, 0.0);
    for i in 0..d.n() {
        let z: f64 = d.row(i).iter().zip(&truth.theta).map(|(a, b)| a * b).sum();
        if (0.9..=1.1).contains(&z) {
            tot += 1.0;
            hit += d.label(i);
        }
    }
    assert!(tot > 1000.0);
    assert!((hit / tot - sigmoid(1.0)).abs() < 0.05, "{}", hit / tot);
}

#[test]
fn response_dimension_check() {
    let x = gen_covariates(&ScenarioSpec::new(CovarianceModel::Independent, 10, 6, 0)).unwrap();
    assert!(gen_response(&x, &true_theta(5).unwrap(), 0).is_err());
}

#[test]
fn indefinite_band_is_rejected() {
    let spec = ScenarioSpec::new(CovarianceModel::Ar1 { rho1: 0.6 }, 20, 100, 0);
    assert!(gen_covariates(&spec).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>(), m in 0usize..3) {
        let model = [CovarianceModel::Independent, CovarianceModel::ar1(), CovarianceModel::ar2()][m];
        let spec = ScenarioSpec::new(model, 30, 120, seed);
        let truth = true_theta(120).unwrap();
        let a = simulate(&spec, &truth).unwrap();
        let b = simulate(&spec, &truth).unwrap();
        prop_assert_eq!(a.x().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.x().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(a.y(), b.y());
    }
}
