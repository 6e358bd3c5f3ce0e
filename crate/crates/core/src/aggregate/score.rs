use std::collections::HashMap;

use super::prior::{log_prior_unnorm, PriorSpec};
use crate::data::{Dataset, SparsityPattern};
use crate::error::Result;
use crate::glm::{fit_constrained_mle, log_likelihood_with_intercept, FitOptions, FittedModel};

/// A training-set fit together with its validation score.
#[derive(Debug, Clone)]
pub struct ScoredModel {
    pub model: FittedModel,
    pub validation_loglik: f64,
    /// `validation_loglik + ln π_m` (unnormalized).
    pub score: f64,
}

/// Memo of fitted models keyed by pattern. Owned by one chain.
#[derive(Debug, Default)]
pub struct FitCache {
    entries: HashMap<SparsityPattern, ScoredModel>,
    models_fitted: usize,
}

impl FitCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of constrained fits actually computed.
    pub fn models_fitted(&self) -> usize {
        self.models_fitted
    }

    pub fn get(&self, pattern: &SparsityPattern) -> Option<&ScoredModel> {
        self.entries.get(pattern)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Everything a score depends on besides the pattern.
#[derive(Debug, Clone, Copy)]
pub struct ScoreContext<'a> {
    pub train: &'a Dataset,
    pub validation: &'a Dataset,
    pub prior: PriorSpec,
    pub fit: FitOptions,
}

impl ScoreContext<'_> {
    /// Scored fit for `pattern`, computing it on first use.
    pub fn scored<'c>(&self, pattern: &SparsityPattern, cache: &'c mut FitCache) -> Result<&'c ScoredModel> {
        if !cache.entries.contains_key(pattern) {
            let model = fit_constrained_mle(self.train, pattern, &self.fit)?;
            let validation_loglik = log_likelihood_with_intercept(model.intercept, &model.theta, self.validation)?;
            let score = validation_loglik + log_prior_unnorm(pattern, &self.prior);
            cache.models_fitted += 1;
            cache.entries.insert(
                pattern.clone(),
                ScoredModel {
                    model,
                    validation_loglik,
                    score,
                },
            );
        }
        Ok(&cache.entries[pattern])
    }
}

/// Log-numerator of the aggregation weight of `pattern`: validation
/// log-likelihood of the training fit plus the unnormalized log-prior.
pub fn score(
    pattern: &SparsityPattern,
    train: &Dataset,
    validation: &Dataset,
    prior: &PriorSpec,
    fit: &FitOptions,
    cache: &mut FitCache,
) -> Result<f64> {
    let ctx = ScoreContext {
        train,
        validation,
        prior: *prior,
        fit: *fit,
    };
    ctx.scored(pattern, cache).map(|s| s.score)
}
