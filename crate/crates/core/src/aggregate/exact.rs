use super::candidates::CandidateSet;
use super::score::{FitCache, ScoreContext};
use super::weights::compute_weights;
use crate::data::SparsityPattern;
use crate::error::{invalid, Error, Result};
use crate::glm::pattern_cap;

pub const MAX_EXACT_CANDIDATES: usize = 20;

/// Fully enumerated aggregate.
#[derive(Debug, Clone)]
pub struct ExactAggregate {
    pub theta: Vec<f64>,
    pub intercept: f64,
    /// Every pattern in the model space, in enumeration order.
    pub patterns: Vec<SparsityPattern>,
    /// Normalized weight of each entry of `patterns`.
    pub weights: Vec<f64>,
}

impl ExactAggregate {
    pub fn weight_of(&self, pattern: &SparsityPattern) -> f64 {
        self.patterns
            .iter()
            .position(|p| p == pattern)
            .map_or(0.0, |i| self.weights[i])
    }
}

/// Weighted average of the fits of every pattern over `candidates` with at
/// most `max_size` active features (default `min(|candidates|, n₁ − 1)`).
pub fn exact_aggregate(
    candidates: &CandidateSet,
    ctx: &ScoreContext<'_>,
    max_size: Option<usize>,
    cache: &mut FitCache,
) -> Result<ExactAggregate> {
    let c = candidates.len();
    if c > MAX_EXACT_CANDIDATES {
        return Err(Error::TooManyCandidates(c));
    }
    let cap = default_cap(candidates, ctx);
    let max_size = match max_size {
        Some(m) if m > cap => return invalid(format!("max pattern size {m} exceeds the limit {cap}")),
        Some(m) => m,
        None => cap,
    };
    let p = ctx.train.p();
    let mut patterns = Vec::new();
    let mut scores = Vec::new();
    for mask in 0u32..(1u32 << c) {
        if mask.count_ones() as usize > max_size {
            continue;
        }
        let active: Vec<usize> = (0..c)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| candidates.features()[b])
            .collect();
        let pattern = SparsityPattern::from_indices(p, &active)?;
        scores.push(ctx.scored(&pattern, cache)?.score);
        patterns.push(pattern);
    }
    let weights = compute_weights(&scores)?;
    let mut theta = vec![0.0; p];
    let mut intercept = 0.0;
    for (pattern, &w) in patterns.iter().zip(&weights) {
        let model = &cache.get(pattern).expect("scored above").model;
        for j in pattern.indices() {
            theta[j] += w * model.theta[j];
        }
        intercept += w * model.intercept;
    }
    Ok(ExactAggregate {
        theta,
        intercept,
        patterns,
        weights,
    })
}

pub(crate) fn default_cap(candidates: &CandidateSet, ctx: &ScoreContext<'_>) -> usize {
    candidates.len().min(pattern_cap(ctx.train.n(), ctx.fit.intercept))
}
