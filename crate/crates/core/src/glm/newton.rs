//! Newton–Raphson maximum likelihood on a restricted design.

use nalgebra::{DMatrix, DVector};

use super::likelihood::{log1pexp, loglik_term, sigmoid};
use crate::data::{Dataset, SparsityPattern};
use crate::error::{invalid, Error, Result};

/// Newton step size (max norm) at a vanishing gradient taken as evidence of
/// separation.
const SEPARATION_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Adds a free, unpenalized intercept. Off by default: the model has no
    /// intercept and the empty pattern is the zero vector.
    pub intercept: bool,
    pub max_iter: usize,
    /// Convergence threshold on the max-norm of the restricted gradient.
    pub grad_tol: f64,
    /// Ridge weight used when the plain fit fails.
    pub ridge: f64,
    /// Any coefficient beyond this magnitude is treated as divergence.
    pub max_abs_coef: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            intercept: false,
            max_iter: 100,
            grad_tol: 1e-8,
            ridge: 1e-4,
            max_abs_coef: 30.0,
        }
    }
}

/// Constrained maximum-likelihood fit for one sparsity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub pattern: SparsityPattern,
    /// Length `p`; exactly zero outside the pattern.
    pub theta: Vec<f64>,
    /// Zero unless fitted with `FitOptions::intercept`.
    pub intercept: f64,
    /// Unpenalized log-likelihood on the training rows.
    pub train_loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub ridge_fallback: bool,
}

/// Column-major design restricted to a handful of columns.
pub(crate) struct Design<'a> {
    pub n: usize,
    pub k: usize,
    pub cols: Vec<f64>,
    pub y: &'a [u8],
}

impl<'a> Design<'a> {
    pub fn restricted(data: &'a Dataset, features: &[usize], intercept: bool) -> Self {
        let n = data.n();
        let k = features.len() + usize::from(intercept);
        let mut cols = Vec::with_capacity(n * k);
        if intercept {
            cols.extend(std::iter::repeat_n(1.0, n));
        }
        for &j in features {
            cols.extend((0..n).map(|i| data.get(i, j)));
        }
        Self { n, k, cols, y: data.y() }
    }

    fn col(&self, c: usize) -> &[f64] {
        &self.cols[c * self.n..(c + 1) * self.n]
    }

    fn eta(&self, beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![0.0; self.n];
        for (c, b) in beta.iter().enumerate() {
            for (e, x) in eta.iter_mut().zip(self.col(c)) {
                *e += b * x;
            }
        }
        eta
    }

    /// `l(η + t·d) − l(η)`, summed row by row so that small steps keep
    /// their sign.
    fn loglik_change(&self, eta: &[f64], direction: &[f64], t: f64) -> f64 {
        eta.iter()
            .zip(direction)
            .zip(self.y)
            .map(|((&z, &d), &y)| {
                let dz = t * d;
                let rise = if dz.abs() < 1.0 {
                    (sigmoid(z) * dz.exp_m1()).ln_1p()
                } else {
                    log1pexp(z + dz) - log1pexp(z)
                };
                f64::from(y) * dz - rise
            })
            .sum()
    }

    fn loglik(&self, eta: &[f64]) -> f64 {
        eta.iter()
            .zip(self.y)
            .map(|(&z, &y)| loglik_term(f64::from(y), z))
            .sum()
    }

    /// Observed information `ZᵀWZ` at `eta`.
    pub fn information(&self, eta: &[f64]) -> DMatrix<f64> {
        let w: Vec<f64> = eta.iter().map(|&z| {
            let m = sigmoid(z);
            m * (1.0 - m)
        }).collect();
        let mut h = DMatrix::zeros(self.k, self.k);
        for a in 0..self.k {
            let ca = self.col(a);
            for b in 0..=a {
                let cb = self.col(b);
                let v: f64 = (0..self.n).map(|i| w[i] * ca[i] * cb[i]).sum();
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        h
    }
}

/// Outcome of one Newton run.
#[derive(Debug, Clone)]
pub(crate) struct NewtonRun {
    pub beta: Vec<f64>,
    pub eta: Vec<f64>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Penalized objective after each accepted iterate, starting from β = 0.
    /// Later entries accumulate the per-step gains, so the path never dips
    /// through rounding.
    pub path: Vec<f64>,
}

enum Stop {
    Done(NewtonRun),
    Diverged,
}

/// Maximizes `l(β) − ridge·‖β‖²`. With `ridge == 0` the run aborts on a
/// singular Hessian or a coefficient beyond `max_abs_coef`.
fn newton(design: &Design<'_>, ridge: f64, opts: &FitOptions) -> Stop {
    let k = design.k;
    let mut beta = vec![0.0; k];
    let mut eta = vec![0.0; design.n];
    let mut loglik = design.loglik(&eta);
    let mut objective = loglik;
    let mut path = vec![objective];

    for iter in 0..=opts.max_iter {
        let mut grad = DVector::zeros(k);
        for (c, g) in grad.iter_mut().enumerate() {
            *g = design
                .col(c)
                .iter()
                .zip(&eta)
                .zip(design.y)
                .map(|((x, &z), &y)| (f64::from(y) - sigmoid(z)) * x)
                .sum::<f64>()
                - 2.0 * ridge * beta[c];
        }
        if grad.amax() < opts.grad_tol {
            // separation: gradient vanishes while the Newton step stays O(1)
            if ridge == 0.0 && k > 0 {
                let step = design.information(&eta).cholesky().map(|c| c.solve(&grad));
                if step.is_none_or(|s| s.amax() > SEPARATION_STEP) {
                    return Stop::Diverged;
                }
            }
            return Stop::Done(NewtonRun { beta, eta, loglik, converged: true, iterations: iter, path });
        }
        if iter == opts.max_iter {
            break;
        }
        let mut hess = design.information(&eta);
        for c in 0..k {
            hess[(c, c)] += 2.0 * ridge;
        }
        let step = match hess.cholesky() {
            Some(chol) => chol.solve(&grad),
            None if ridge == 0.0 => return Stop::Diverged,
            None => return Stop::Done(NewtonRun { beta, eta, loglik, converged: false, iterations: iter, path }),
        };
        let direction = design.eta(step.as_slice());

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let gain = design.loglik_change(&eta, &direction, t)
                - ridge
                    * beta
                        .iter()
                        .zip(step.iter())
                        .map(|(b, s)| (2.0 * b + t * s) * t * s)
                        .sum::<f64>();
            if gain >= 0.0 {
                let trial: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + t * s).collect();
                accepted = Some((trial, gain));
                break;
            }
            t *= 0.5;
        }
        let Some((b, gain)) = accepted else {
            // no ascent possible at machine precision
            if ridge == 0.0 {
                return Stop::Diverged;
            }
            return Stop::Done(NewtonRun { beta, eta, loglik, converged: false, iterations: iter, path });
        };
        beta = b;
        eta = design.eta(&beta);
        loglik = design.loglik(&eta);
        objective += gain;
        path.push(objective);
        if ridge == 0.0 && beta.iter().any(|v| v.abs() > opts.max_abs_coef) {
            return Stop::Diverged;
        }
    }
    if ridge == 0.0 {
        return Stop::Diverged;
    }
    Stop::Done(NewtonRun { beta, eta, loglik, converged: false, iterations: opts.max_iter, path })
}

/// Plain Newton fit with the ridge fallback; returns the run and whether
/// the fallback was used.
pub(crate) fn fit_design(design: &Design<'_>, opts: &FitOptions) -> (NewtonRun, bool) {
    match newton(design, 0.0, opts) {
        Stop::Done(run) => (run, false),
        Stop::Diverged => match newton(design, opts.ridge, opts) {
            Stop::Done(run) => (run, true),
            Stop::Diverged => unreachable!("ridge runs never report divergence"),
        },
    }
}

/// Largest pattern size a training set of `n` rows supports.
pub fn pattern_cap(n: usize, intercept: bool) -> usize {
    n.saturating_sub(1 + usize::from(intercept))
}

/// Maximizes the log-likelihood on `train` over coefficient vectors that
/// vanish outside `pattern`.
///
/// Newton iterations with step halving; converged when the restricted
/// gradient's max-norm drops below `opts.grad_tol`. A singular Hessian, a
/// coefficient beyond `opts.max_abs_coef` or exhausting `opts.max_iter`
/// triggers a refit with a small ridge term (`ridge_fallback = true`).
pub fn fit_constrained_mle(train: &Dataset, pattern: &SparsityPattern, opts: &FitOptions) -> Result<FittedModel> {
    fit_constrained_mle_path(train, pattern, opts).map(|(m, _)| m)
}

/// Like [`fit_constrained_mle`], also returning the objective after every
/// accepted Newton iterate.
pub fn fit_constrained_mle_path(
    train: &Dataset,
    pattern: &SparsityPattern,
    opts: &FitOptions,
) -> Result<(FittedModel, Vec<f64>)> {
    if pattern.len() != train.p() {
        return Err(Error::DimensionMismatch {
            expected: train.p(),
            found: pattern.len(),
        });
    }
    let cap = pattern_cap(train.n(), opts.intercept);
    if pattern.count() > cap {
        return Err(Error::PatternTooLarge {
            count: pattern.count(),
            cap,
        });
    }
    if !(opts.ridge > 0.0) {
        return invalid("ridge fallback weight must be positive");
    }
    let features = pattern.to_indices();
    let design = Design::restricted(train, &features, opts.intercept);
    let (run, ridge_fallback) = fit_design(&design, opts);

    let offset = usize::from(opts.intercept);
    let mut theta = vec![0.0; train.p()];
    for (slot, &j) in features.iter().enumerate() {
        theta[j] = run.beta[slot + offset];
    }
    let intercept = if opts.intercept { run.beta[0] } else { 0.0 };
    if !run.loglik.is_finite() || theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite fit for {pattern:?}")));
    }
    Ok((
        FittedModel {
            pattern: pattern.clone(),
            theta,
            intercept,
            train_loglik: run.loglik,
            converged: run.converged,
            iterations: run.iterations,
            ridge_fallback,
        },
        run.path,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_feature(rows: &[(f64, u8)]) -> Dataset {
        Dataset::with_default_names(
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn empty_pattern_is_zero() {
        let d = one_feature(&[(1.0, 1), (2.0, 0), (0.5, 1)]);
        let m = fit_constrained_mle(&d, &SparsityPattern::empty(1), &FitOptions::default()).unwrap();
        assert_eq!(m.theta, vec![0.0]);
        assert!((m.train_loglik + 3.0 * 2f64.ln()).abs() < 1e-14);
        assert!(m.converged && !m.ridge_fallback);
    }

    #[test]
    fn symmetric_labels_give_zero() {
        let d = one_feature(&[(1.0, 1), (1.0, 0)]);
        let m = fit_constrained_mle(&d, &SparsityPattern::full(1), &FitOptions::default()).unwrap();
        assert!(m.theta[0].abs() < 1e-12);
        assert!(m.converged);
    }

    #[test]
    fn separable_data_falls_back_to_ridge() {
        let d = one_feature(&[(1.0, 1), (-1.0, 0)]);
        let m = fit_constrained_mle(&d, &SparsityPattern::full(1), &FitOptions::default()).unwrap();
        assert!(m.ridge_fallback);
        assert!(m.theta[0].is_finite() && m.theta[0] > 1.0);
        assert!(m.converged);
    }

    #[test]
    fn duplicate_columns_fall_back_to_ridge() {
        let x = vec![1.0, 1.0, -0.5, -0.5, 2.0, 2.0, 0.3, 0.3];
        let d = Dataset::with_default_names(x, vec![1, 0, 1, 1], 2).unwrap();
        let m = fit_constrained_mle(&d, &SparsityPattern::full(2), &FitOptions::default()).unwrap();
        assert!(m.ridge_fallback);
        assert!((m.theta[0] - m.theta[1]).abs() < 1e-8);
    }

    #[test]
    fn cap_and_dimension_errors() {
        let d = one_feature(&[(1.0, 1), (2.0, 0)]);
        assert!(matches!(
            fit_constrained_mle(&d, &SparsityPattern::full(2), &FitOptions::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let tiny = one_feature(&[(1.0, 1)]);
        assert!(matches!(
            fit_constrained_mle(&tiny, &SparsityPattern::full(1), &FitOptions::default()),
            Err(Error::PatternTooLarge { .. })
        ));
    }

    #[test]
    fn intercept_only_fit_matches_logit_of_mean() {
        let d = one_feature(&[(0.1, 1), (0.2, 1), (0.3, 1), (0.4, 0)]);
        let opts = FitOptions { intercept: true, ..Default::default() };
        let m = fit_constrained_mle(&d, &SparsityPattern::empty(1), &opts).unwrap();
        assert!((m.intercept - 3f64.ln()).abs() < 1e-9);
        assert_eq!(m.theta, vec![0.0]);
    }
}
