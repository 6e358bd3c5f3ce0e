//! Split → screen → aggregate.

use std::fmt;
use std::str::FromStr;

use super::candidates::{CandidateSet, CandidateSource};
use super::mh::{mh_aggregate, AggregateEstimate, MhConfig};
use super::prior::PriorSpec;
use super::score::{FitCache, ScoreContext};
use crate::data::{split, Dataset, SplitSpec};
use crate::error::{invalid, Error, Result};
use crate::glm::{
    cross_validate, fit_penalized, lambda_path, retain_by_pvalue, single_locus_pvalues, FitOptions,
    PenalizedOptions, PenaltySpec,
};
use crate::seed::{self, stage};

/// How the candidate set is pre-screened on the estimation subsample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Screen {
    /// Support of the cross-validated lasso.
    L1Cv { folds: usize, n_lambda: usize },
    /// Features whose single-locus p-value is at most `threshold`.
    Marginal { threshold: f64 },
    /// No screening; only for small `p`.
    None,
}

impl Screen {
    pub fn l1cv() -> Self {
        Screen::L1Cv {
            folds: 10,
            n_lambda: 30,
        }
    }
}

impl Default for Screen {
    fn default() -> Self {
        Screen::l1cv()
    }
}

impl fmt::Display for Screen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Screen::L1Cv { .. } => f.write_str("l1cv"),
            Screen::Marginal { threshold } => write!(f, "marginal:{threshold}"),
            Screen::None => f.write_str("none"),
        }
    }
}

impl FromStr for Screen {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1cv" => Ok(Screen::l1cv()),
            "none" => Ok(Screen::None),
            _ => match s.strip_prefix("marginal") {
                Some("") => Ok(Screen::Marginal { threshold: 0.01 }),
                Some(rest) => {
                    let t: f64 = rest
                        .strip_prefix(':')
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| Error::InvalidInput(format!("bad marginal threshold in '{s}'")))?;
                    if !(0.0..=1.0).contains(&t) {
                        return invalid(format!("marginal threshold {t} must lie in [0, 1]"));
                    }
                    Ok(Screen::Marginal { threshold: t })
                }
                None => invalid(format!("unknown screen '{s}' (expected l1cv, marginal:T or none)")),
            },
        }
    }
}

/// Which `p` enters the sparsity prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriorMode {
    /// The original number of features.
    #[default]
    Global,
    /// The size of the screened candidate set.
    Candidates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaConfig {
    pub split_ratio: f64,
    pub stratified: bool,
    pub screen: Screen,
    pub prior: PriorMode,
    pub burnin: usize,
    pub iterations: usize,
    pub max_pattern_size: Option<usize>,
    pub fit: FitOptions,
    pub seed: u64,
}

impl Default for LaConfig {
    fn default() -> Self {
        Self {
            split_ratio: 0.5,
            stratified: false,
            screen: Screen::default(),
            prior: PriorMode::Global,
            burnin: 100,
            iterations: 2000,
            max_pattern_size: None,
            fit: FitOptions::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LaFit {
    pub estimate: AggregateEstimate,
    pub split: SplitSpec,
    pub candidates: CandidateSet,
    pub prior: PriorSpec,
}

/// Lasso support on `data`, with λ chosen by cross-validation.
pub fn l1cv_support(data: &Dataset, folds: usize, n_lambda: usize, intercept: bool, seed: u64) -> Result<Vec<usize>> {
    let opts = PenalizedOptions {
        intercept,
        ..Default::default()
    };
    let ratio = if data.n() < data.p() { 0.01 } else { 1e-4 };
    let grid = lambda_path(data, 1.0, n_lambda, ratio, intercept);
    let cv = cross_validate(data, &grid, &[1.0], folds.min(data.n()), seed, &opts)?;
    let fit = fit_penalized(data, &PenaltySpec::lasso(cv.best.lambda), &opts)?;
    Ok(fit.support())
}

pub fn screen_candidates(data: &Dataset, screen: &Screen, intercept: bool, seed: u64) -> Result<CandidateSet> {
    let (features, source) = match *screen {
        Screen::L1Cv { folds, n_lambda } => (
            l1cv_support(data, folds, n_lambda, intercept, seed)?,
            CandidateSource::L1Cv,
        ),
        Screen::Marginal { threshold } => (
            retain_by_pvalue(&single_locus_pvalues(data), threshold),
            CandidateSource::Marginal,
        ),
        Screen::None => {
            if data.p() > 20 {
                return invalid(format!(
                    "screen 'none' walks all {} features; use it only with p <= 20",
                    data.p()
                ));
            }
            return Ok(CandidateSet::all(data.p()));
        }
    };
    if features.is_empty() {
        return Err(Error::EmptyCandidateSet(screen.to_string()));
    }
    CandidateSet::new(features, data.p(), source)
}

/// The full estimator: split the rows, screen on the first subsample, then
/// run the chain with the first subsample for fitting and the second for
/// scoring.
pub fn la_fit(data: &Dataset, config: &LaConfig) -> Result<LaFit> {
    let split_spec = split(
        data,
        config.split_ratio,
        seed::derive(config.seed, stage::SPLIT, 0),
        config.stratified,
    )?;
    let train = data.restrict(&split_spec.first)?;
    let validation = data.restrict(&split_spec.second)?;
    let candidates = screen_candidates(
        &train,
        &config.screen,
        config.fit.intercept,
        seed::derive(config.seed, stage::SCREEN, 0),
    )?;
    let prior = PriorSpec::new(match config.prior {
        PriorMode::Global => data.p(),
        PriorMode::Candidates => candidates.len(),
    });
    let ctx = ScoreContext {
        train: &train,
        validation: &validation,
        prior,
        fit: config.fit,
    };
    let mh = MhConfig {
        burnin: config.burnin,
        iterations: config.iterations,
        seed: seed::derive(config.seed, stage::MH, 0),
        max_pattern_size: config.max_pattern_size,
    };
    let mut cache = FitCache::new();
    let estimate = mh_aggregate(&candidates, &ctx, &mh, &mut cache)?;
    Ok(LaFit {
        estimate,
        split: split_spec,
        candidates,
        prior,
    })
}
