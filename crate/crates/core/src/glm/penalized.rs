//! L1 / elastic-net penalized logistic regression by cyclic coordinate
//! ascent.
//!
//! Maximizes `l(θ)/n − λ·(α‖θ‖₁ + (1−α)/2·‖θ‖²)`. Each outer step builds
//! the quadratic (IRLS) approximation of the likelihood at the current
//! point, solves the penalized weighted least-squares problem by cyclic
//! soft-thresholding, then backtracks along the resulting direction until
//! the true objective does not decrease.

use super::likelihood::{loglik_term, sigmoid};
use crate::data::Dataset;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec {
    pub lambda: f64,
    /// 1 is the lasso, 0 is ridge.
    pub alpha: f64,
}

impl PenaltySpec {
    pub fn lasso(lambda: f64) -> Self {
        Self { lambda, alpha: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return invalid(format!("lambda {} must be a finite nonnegative number", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return invalid(format!("alpha {} must lie in [0, 1]", self.alpha));
        }
        Ok(())
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let l1: f64 = theta.iter().map(|t| t.abs()).sum();
        let l2: f64 = theta.iter().map(|t| t * t).sum();
        self.lambda * (self.alpha * l1 + 0.5 * (1.0 - self.alpha) * l2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenalizedOptions {
    /// Unpenalized intercept.
    pub intercept: bool,
    /// Stop once an outer step moves no coordinate by more than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for PenalizedOptions {
    fn default() -> Self {
        Self {
            intercept: false,
            tol: 1e-7,
            max_sweeps: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedFit {
    pub theta: Vec<f64>,
    pub intercept: f64,
    pub penalty: PenaltySpec,
    pub sweeps: usize,
    pub converged: bool,
}

impl PenalizedFit {
    pub fn support(&self) -> Vec<usize> {
        self.theta
            .iter()
            .enumerate()
            .filter(|(_, t)| **t != 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

fn soft_threshold(u: f64, gamma: f64) -> f64 {
    if u > gamma {
        u - gamma
    } else if u < -gamma {
        u + gamma
    } else {
        0.0
    }
}

/// Column-major copy of a dataset, reused across a regularization path.
pub struct PenalizedSolver {
    n: usize,
    p: usize,
    cols: Vec<f64>,
    y: Vec<f64>,
}

impl PenalizedSolver {
    pub fn new(data: &Dataset) -> Self {
        let (n, p) = (data.n(), data.p());
        let mut cols = vec![0.0; n * p];
        for i in 0..n {
            for (j, &v) in data.row(i).iter().enumerate() {
                cols[j * n + i] = v;
            }
        }
        Self {
            n,
            p,
            cols,
            y: (0..n).map(|i| data.label(i)).collect(),
        }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    /// Smallest λ at which the all-zero coefficient vector is optimal.
    pub fn lambda_max(&self, alpha: f64, intercept: bool) -> f64 {
        let base = if intercept {
            let ybar = self.y.iter().sum::<f64>() / self.n as f64;
            ybar
        } else {
            0.5
        };
        let nf = self.n as f64;
        let gmax = (0..self.p)
            .map(|j| {
                self.col(j)
                    .iter()
                    .zip(&self.y)
                    .map(|(x, y)| (y - base) * x)
                    .sum::<f64>()
                    .abs()
                    / nf
            })
            .fold(0.0, f64::max);
        gmax / alpha.max(1e-3)
    }

    fn objective(&self, eta: &[f64], theta: &[f64], penalty: &PenaltySpec) -> f64 {
        let ll: f64 = eta.iter().zip(&self.y).map(|(&z, &y)| loglik_term(y, z)).sum();
        ll / self.n as f64 - penalty.value(theta)
    }

    pub fn fit(
        &self,
        penalty: &PenaltySpec,
        opts: &PenalizedOptions,
        warm: Option<(&[f64], f64)>,
    ) -> Result<PenalizedFit> {
        penalty.validate()?;
        let (n, p) = (self.n, self.p);
        let nf = n as f64;
        let (mut theta, mut b) = match warm {
            Some((t, b)) if t.len() == p => (t.to_vec(), if opts.intercept { b } else { 0.0 }),
            Some((t, _)) => {
                return Err(crate::error::Error::DimensionMismatch {
                    expected: p,
                    found: t.len(),
                })
            }
            None => (vec![0.0; p], 0.0),
        };
        let mut eta = vec![b; n];
        for (j, &t) in theta.iter().enumerate() {
            if t != 0.0 {
                for (e, x) in eta.iter_mut().zip(self.col(j)) {
                    *e += t * x;
                }
            }
        }
        let l1 = penalty.lambda * penalty.alpha;
        let l2 = penalty.lambda * (1.0 - penalty.alpha);
        let inner_tol = 0.1 * opts.tol;

        let mut w = vec![0.0; n];
        let mut r = vec![0.0; n];
        let mut xv = vec![0.0; p];
        let mut sweeps = 0;
        let mut converged = false;
        let mut objective = self.objective(&eta, &theta, penalty);

        while sweeps < opts.max_sweeps {
            for i in 0..n {
                let m = sigmoid(eta[i]);
                w[i] = (m * (1.0 - m)).max(1e-5);
                r[i] = (self.y[i] - m) / w[i];
            }
            for (j, v) in xv.iter_mut().enumerate() {
                *v = self.col(j).iter().zip(&w).map(|(x, wi)| wi * x * x).sum::<f64>() / nf;
            }
            let wsum: f64 = w.iter().sum();

            let mut next = theta.clone();
            let mut next_b = b;
            let update = |j: usize, next: &mut [f64], r: &mut [f64]| -> f64 {
                let col = self.col(j);
                let g = col.iter().zip(r.iter()).zip(&w).map(|((x, ri), wi)| wi * x * ri).sum::<f64>() / nf;
                let denom = xv[j] + l2;
                let new = if denom > 0.0 {
                    soft_threshold(g + xv[j] * next[j], l1) / denom
                } else {
                    0.0
                };
                let delta = new - next[j];
                if delta != 0.0 {
                    for (ri, x) in r.iter_mut().zip(col) {
                        *ri -= delta * x;
                    }
                    next[j] = new;
                }
                delta.abs()
            };
            let update_intercept = |r: &mut [f64], next_b: &mut f64| -> f64 {
                if !opts.intercept {
                    return 0.0;
                }
                let db = r.iter().zip(&w).map(|(ri, wi)| wi * ri).sum::<f64>() / wsum;
                for ri in r.iter_mut() {
                    *ri -= db;
                }
                *next_b += db;
                db.abs()
            };

            'inner: loop {
                let mut change = update_intercept(&mut r, &mut next_b);
                for j in 0..p {
                    change = change.max(update(j, &mut next, &mut r));
                }
                sweeps += 1;
                if change < inner_tol || sweeps >= opts.max_sweeps {
                    break;
                }
                let active: Vec<usize> = (0..p).filter(|&j| next[j] != 0.0).collect();
                loop {
                    let mut change = update_intercept(&mut r, &mut next_b);
                    for &j in &active {
                        change = change.max(update(j, &mut next, &mut r));
                    }
                    sweeps += 1;
                    if sweeps >= opts.max_sweeps {
                        break 'inner;
                    }
                    if change < inner_tol {
                        break;
                    }
                }
            }

            // backtrack along the proximal-Newton direction
            let dir: Vec<(usize, f64)> = (0..p)
                .filter(|&j| next[j] != theta[j])
                .map(|j| (j, next[j] - theta[j]))
                .collect();
            let db = next_b - b;
            let mut deta = vec![db; n];
            for &(j, d) in &dir {
                for (e, x) in deta.iter_mut().zip(self.col(j)) {
                    *e += d * x;
                }
            }
            let mut t = 1.0;
            let mut accepted = false;
            let mut trial = theta.clone();
            let mut trial_eta = eta.clone();
            for _ in 0..40 {
                for &(j, d) in &dir {
                    trial[j] = theta[j] + t * d;
                }
                for i in 0..n {
                    trial_eta[i] = eta[i] + t * deta[i];
                }
                let obj = self.objective(&trial_eta, &trial, penalty);
                if obj >= objective - 1e-13 * (1.0 + objective.abs()) {
                    objective = obj;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            let step = dir.iter().map(|(_, d)| (t * d).abs()).fold((t * db).abs(), f64::max);
            if !accepted {
                // the direction is no ascent at machine precision: stationary
                converged = step < opts.tol || dir.is_empty();
                break;
            }
            theta = trial;
            eta = trial_eta;
            b += t * db;
            if step < opts.tol {
                converged = true;
                break;
            }
        }

        Ok(PenalizedFit {
            theta,
            intercept: b,
            penalty: *penalty,
            sweeps,
            converged,
        })
    }
}

/// Penalized fit on `train`, starting from zero.
pub fn fit_penalized(train: &Dataset, penalty: &PenaltySpec, opts: &PenalizedOptions) -> Result<PenalizedFit> {
    PenalizedSolver::new(train).fit(penalty, opts, None)
}

/// `len` log-spaced penalties from `λ_max(alpha)` down to
/// `min_ratio·λ_max`, in decreasing order.
pub fn lambda_path(train: &Dataset, alpha: f64, len: usize, min_ratio: f64, intercept: bool) -> Vec<f64> {
    let top = PenalizedSolver::new(train).lambda_max(alpha, intercept);
    log_grid(top, top * min_ratio, len)
}

pub(crate) fn log_grid(hi: f64, lo: f64, len: usize) -> Vec<f64> {
    match len {
        0 => vec![],
        1 => vec![hi],
        _ => {
            let (a, b) = (hi.ln(), lo.ln());
            (0..len)
                .map(|k| (a + (b - a) * k as f64 / (len - 1) as f64).exp())
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
    }

    #[test]
    fn invalid_penalties() {
        assert!(PenaltySpec { lambda: -1.0, alpha: 1.0 }.validate().is_err());
        assert!(PenaltySpec { lambda: 1.0, alpha: 1.5 }.validate().is_err());
        assert!(PenaltySpec { lambda: f64::NAN, alpha: 0.5 }.validate().is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1.0, 0.01, 3);
        assert!((g[0] - 1.0).abs() < 1e-15 && (g[1] - 0.1).abs() < 1e-12 && (g[2] - 0.01).abs() < 1e-12);
    }
}
