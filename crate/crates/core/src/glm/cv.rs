//! K-fold cross-validation over a (λ, α) grid.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::likelihood::{linear_predictor, loglik_term};
use super::penalized::{PenalizedOptions, PenalizedSolver, PenaltySpec};
use crate::data::Dataset;
use crate::error::{invalid, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvScore {
    pub penalty: PenaltySpec,
    /// Held-out log-likelihood averaged over folds.
    pub mean_loglik: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub best: PenaltySpec,
    /// One entry per grid point, α-major in the order given, λ in the order
    /// given.
    pub scores: Vec<CvScore>,
}

/// Fold label of every row: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

/// Picks the grid point with the highest mean held-out log-likelihood.
/// Exact ties go to the larger λ, then the larger α.
pub fn cross_validate(
    train: &Dataset,
    lambda_grid: &[f64],
    alpha_grid: &[f64],
    folds: usize,
    seed: u64,
    opts: &PenalizedOptions,
) -> Result<CvResult> {
    if lambda_grid.is_empty() || alpha_grid.is_empty() {
        return invalid("cross-validation grids must be nonempty");
    }
    if folds < 2 {
        return invalid(format!("need at least 2 folds, got {folds}"));
    }
    if folds > train.n() {
        return invalid(format!("{folds} folds exceed the {} available rows", train.n()));
    }
    for &alpha in alpha_grid {
        for &lambda in lambda_grid {
            PenaltySpec { lambda, alpha }.validate()?;
        }
    }

    let assignment = fold_assignment(train.n(), folds, seed);
    // warm starts run from the largest penalty down
    let mut lambda_order: Vec<usize> = (0..lambda_grid.len()).collect();
    lambda_order.sort_by(|&a, &b| lambda_grid[b].total_cmp(&lambda_grid[a]));

    let per_fold: Vec<Result<Vec<f64>>> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let fit_rows: Vec<usize> = (0..train.n()).filter(|&i| assignment[i] != f).collect();
            let held_rows: Vec<usize> = (0..train.n()).filter(|&i| assignment[i] == f).collect();
            let fit_set = train.restrict(&fit_rows)?;
            let held = train.restrict(&held_rows)?;
            let solver = PenalizedSolver::new(&fit_set);
            let mut out = vec![0.0; alpha_grid.len() * lambda_grid.len()];
            for (a, &alpha) in alpha_grid.iter().enumerate() {
                let mut warm: Option<(Vec<f64>, f64)> = None;
                for &l in &lambda_order {
                    let penalty = PenaltySpec { lambda: lambda_grid[l], alpha };
                    let fit = solver.fit(&penalty, opts, warm.as_ref().map(|(t, b)| (t.as_slice(), *b)))?;
                    out[a * lambda_grid.len() + l] = (0..held.n())
                        .map(|i| loglik_term(held.label(i), linear_predictor(fit.intercept, &fit.theta, held.row(i))))
                        .sum();
                    warm = Some((fit.theta, fit.intercept));
                }
            }
            Ok(out)
        })
        .collect();

    let mut totals = vec![0.0; alpha_grid.len() * lambda_grid.len()];
    for fold in per_fold {
        for (t, v) in totals.iter_mut().zip(fold?) {
            *t += v;
        }
    }
    let scores: Vec<CvScore> = alpha_grid
        .iter()
        .flat_map(|&alpha| lambda_grid.iter().map(move |&lambda| PenaltySpec { lambda, alpha }))
        .zip(&totals)
        .map(|(penalty, &total)| CvScore {
            penalty,
            mean_loglik: total / folds as f64,
        })
        .collect();

    let best = scores
        .iter()
        .copied()
        .reduce(|best, s| {
            let better = s.mean_loglik > best.mean_loglik
                || (s.mean_loglik == best.mean_loglik
                    && (s.penalty.lambda > best.penalty.lambda
                        || (s.penalty.lambda == best.penalty.lambda && s.penalty.alpha > best.penalty.alpha)));
            if better {
                s
            } else {
                best
            }
        })
        .expect("grid is nonempty")
        .penalty;
    Ok(CvResult { best, scores })
}
