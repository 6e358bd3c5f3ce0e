//! Single-feature logistic tests with Bonferroni selection.

use rayon::prelude::*;
use statrs::function::erf::erfc;

use super::newton::{fit_design, Design, FitOptions};
use crate::data::Dataset;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalTestResult {
    pub feature: usize,
    pub coefficient: f64,
    pub std_error: f64,
    pub p_value: f64,
    /// Zero-variance feature; reported with coefficient 0 and p-value 1.
    pub degenerate: bool,
}

/// Two-sided normal tail probability of a Wald statistic.
pub fn wald_p_value(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

fn test_feature(data: &Dataset, j: usize) -> MarginalTestResult {
    let first = data.get(0, j);
    if (0..data.n()).all(|i| data.get(i, j) == first) {
        return MarginalTestResult {
            feature: j,
            coefficient: 0.0,
            std_error: f64::INFINITY,
            p_value: 1.0,
            degenerate: true,
        };
    }
    let design = Design::restricted(data, &[j], true);
    let (run, _) = fit_design(&design, &FitOptions::default());
    let info = design.information(&run.eta);
    let se = info
        .try_inverse()
        .map(|inv| inv[(1, 1)].sqrt())
        .filter(|s| s.is_finite())
        .unwrap_or(f64::INFINITY);
    let coefficient = run.beta[1];
    let p_value = if se.is_finite() { wald_p_value(coefficient / se) } else { 1.0 };
    MarginalTestResult {
        feature: j,
        coefficient,
        std_error: se,
        p_value,
        degenerate: false,
    }
}

/// Fits `y ~ intercept + x_j` for every feature and reports two-sided Wald
/// p-values, the standard error coming from the observed information.
pub fn single_locus_pvalues(data: &Dataset) -> Vec<MarginalTestResult> {
    (0..data.p()).into_par_iter().map(|j| test_feature(data, j)).collect()
}

/// Features with `p_value < level / m`, `m` being the number of tests.
///
/// # Panics
///
/// If `level` is outside `(0, 1)`.
pub fn bonferroni_select(results: &[MarginalTestResult], level: f64) -> Vec<usize> {
    assert!(level > 0.0 && level < 1.0, "significance level {level} must lie in (0, 1)");
    let cutoff = level / results.len() as f64;
    results
        .iter()
        .filter(|r| r.p_value < cutoff)
        .map(|r| r.feature)
        .collect()
}

/// Features whose p-value does not exceed `threshold`.
pub fn retain_by_pvalue(results: &[MarginalTestResult], threshold: f64) -> Vec<usize> {
    results
        .iter()
        .filter(|r| r.p_value <= threshold)
        .map(|r| r.feature)
        .collect()
}
