//! Synthetic designs and logistic responses for the simulation study.
//!
//! Three covariate laws: i.i.d. standard Gaussian, and Gaussian with a
//! banded (lag-1 or lag-2 autoregressive) precision matrix on the first
//! `block` coordinates, the rest i.i.d. standard Gaussian.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{default_names, Dataset};
use crate::error::{invalid, Error, Result};
use crate::glm::sigmoid;
use crate::seed;

pub const TRUE_SUPPORT: usize = 5;
pub const TRUE_VALUE: f64 = 2.0;
pub const DEFAULT_BLOCK: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovarianceModel {
    Independent,
    /// Precision with unit diagonal and `rho1` on the first off-diagonals.
    Ar1 { rho1: f64 },
    /// As `Ar1`, plus `rho2` on the second off-diagonals.
    Ar2 { rho1: f64, rho2: f64 },
}

impl CovarianceModel {
    pub fn ar1() -> Self {
        CovarianceModel::Ar1 { rho1: 0.4 }
    }

    pub fn ar2() -> Self {
        CovarianceModel::Ar2 { rho1: 0.3, rho2: 0.15 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CovarianceModel::Independent => "indep",
            CovarianceModel::Ar1 { .. } => "ar1",
            CovarianceModel::Ar2 { .. } => "ar2",
        }
    }

    /// The banded precision matrix of a correlated block of size `size`.
    pub fn precision(&self, size: usize) -> DMatrix<f64> {
        let (r1, r2) = match *self {
            CovarianceModel::Independent => (0.0, 0.0),
            CovarianceModel::Ar1 { rho1 } => (rho1, 0.0),
            CovarianceModel::Ar2 { rho1, rho2 } => (rho1, rho2),
        };
        DMatrix::from_fn(size, size, |i, j| match i.abs_diff(j) {
            0 => 1.0,
            1 => r1,
            2 => r2,
            _ => 0.0,
        })
    }
}

impl FromStr for CovarianceModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indep" | "independent" => Ok(CovarianceModel::Independent),
            "ar1" => Ok(CovarianceModel::ar1()),
            "ar2" => Ok(CovarianceModel::ar2()),
            _ => invalid(format!("unknown covariate model '{s}' (expected indep, ar1 or ar2)")),
        }
    }
}

impl fmt::Display for CovarianceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub model: CovarianceModel,
    pub n: usize,
    pub p: usize,
    pub block: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(model: CovarianceModel, n: usize, p: usize, seed: u64) -> Self {
        Self {
            model,
            n,
            p,
            block: DEFAULT_BLOCK.min(p),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return invalid(format!("n = {} but at least 2 rows are needed", self.n));
        }
        if self.p < TRUE_SUPPORT {
            return invalid(format!("p = {} but at least {TRUE_SUPPORT} features are needed", self.p));
        }
        if self.block > self.p {
            return invalid(format!("correlated block {} exceeds p = {}", self.block, self.p));
        }
        if let CovarianceModel::Ar1 { rho1: a } | CovarianceModel::Ar2 { rho1: a, .. } = self.model {
            if !a.is_finite() {
                return invalid("band parameters must be finite");
            }
        }
        if let CovarianceModel::Ar2 { rho2, .. } = self.model {
            if !rho2.is_finite() {
                return invalid("band parameters must be finite");
            }
        }
        Ok(())
    }
}

/// Row-major `n × p` covariate draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariates {
    pub n: usize,
    pub p: usize,
    pub values: Vec<f64>,
}

impl Covariates {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrueCoefficients {
    pub theta: Vec<f64>,
    pub support: Vec<usize>,
}

/// `(2, 2, 2, 2, 2, 0, …, 0)` of length `p`.
pub fn true_theta(p: usize) -> Result<TrueCoefficients> {
    if p < TRUE_SUPPORT {
        return invalid(format!("p = {p} is smaller than the true support size {TRUE_SUPPORT}"));
    }
    let mut theta = vec![0.0; p];
    theta[..TRUE_SUPPORT].fill(TRUE_VALUE);
    Ok(TrueCoefficients {
        theta,
        support: (0..TRUE_SUPPORT).collect(),
    })
}

/// Draws the design of `spec`. Correlated rows are `x = R⁻¹ z` where
/// `Ω = RᵀR` is the upper Cholesky factorization of the precision, so that
/// `Cov(x) = Ω⁻¹`.
pub fn gen_covariates(spec: &ScenarioSpec) -> Result<Covariates> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let mut rng = seed::rng(spec.seed);
    let mut values: Vec<f64> = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();

    if !matches!(spec.model, CovarianceModel::Independent) && spec.block > 0 {
        let b = spec.block;
        let chol = spec.model.precision(b).cholesky().ok_or_else(|| {
            Error::NotPositiveDefinite(format!("{:?} precision with block {b}", spec.model))
        })?;
        let upper = chol.l().transpose();
        let z = DMatrix::from_fn(b, n, |k, i| values[i * p + k]);
        let x = upper
            .solve_upper_triangular(&z)
            .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
        for i in 0..n {
            for k in 0..b {
                values[i * p + k] = x[(k, i)];
            }
        }
    }
    Ok(Covariates { n, p, values })
}

/// `y_i ~ Bernoulli(σ(x_iᵀθ))`.
pub fn gen_response(x: &Covariates, truth: &TrueCoefficients, seed: u64) -> Result<Vec<u8>> {
    if truth.theta.len() != x.p {
        return Err(Error::DimensionMismatch {
            expected: x.p,
            found: truth.theta.len(),
        });
    }
    let mut rng = seed::rng(seed);
    Ok((0..x.n)
        .map(|i| {
            let eta: f64 = x.row(i).iter().zip(&truth.theta).map(|(a, b)| a * b).sum();
            let u: f64 = rng.random();
            u8::from(u < sigmoid(eta))
        })
        .collect())
}

/// Covariates and labels for `spec`, with the label stream derived from
/// `spec.seed`.
pub fn simulate(spec: &ScenarioSpec, truth: &TrueCoefficients) -> Result<Dataset> {
    let x = gen_covariates(spec)?;
    let y = gen_response(&x, truth, seed::derive(spec.seed, seed::stage::TRAIN_Y, 0))?;
    Dataset::new(x.values, y, default_names(spec.p))
}
