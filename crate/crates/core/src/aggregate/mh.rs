//! Metropolis–Hastings random walk over sparsity patterns.

use std::collections::BTreeMap;

use rand::Rng;

use super::candidates::CandidateSet;
use super::exact::default_cap;
use super::score::{FitCache, ScoreContext};
use crate::data::SparsityPattern;
use crate::error::{invalid, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MhConfig {
    /// Discarded steps before averaging (T₀).
    pub burnin: usize,
    /// Averaged steps (T).
    pub iterations: usize,
    pub seed: u64,
    /// Defaults to `min(|candidates|, n₁ − 1)`.
    pub max_pattern_size: Option<usize>,
}

impl MhConfig {
    /// T₀ = 100, T = 2000.
    pub fn simulation(seed: u64) -> Self {
        Self {
            burnin: 100,
            iterations: 2000,
            seed,
            max_pattern_size: None,
        }
    }

    /// T₀ = 500, T = 1500.
    pub fn real_data(seed: u64) -> Self {
        Self {
            burnin: 500,
            iterations: 1500,
            seed,
            max_pattern_size: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub iteration: usize,
    pub pattern_size: usize,
    pub accepted: bool,
    /// Score of the state after this step.
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct AggregateEstimate {
    /// Mean of the post-burn-in states' coefficient vectors.
    pub theta: Vec<f64>,
    pub intercept: f64,
    /// One entry per step, burn-in included.
    pub trace: Vec<TraceStep>,
    pub acceptance_rate: f64,
    /// Post-burn-in visits per pattern; sums to `iterations`.
    pub visit_counts: BTreeMap<SparsityPattern, usize>,
    pub models_fitted: usize,
    pub max_pattern_size: usize,
}

impl AggregateEstimate {
    pub fn trace_sizes(&self) -> Vec<usize> {
        self.trace.iter().map(|s| s.pattern_size).collect()
    }

    /// Features with a nonzero averaged coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.theta.len()).filter(|&j| self.theta[j] != 0.0).collect()
    }
}

/// Runs the chain from the empty pattern. Each step proposes flipping one
/// uniformly chosen candidate and accepts with probability
/// `min{1, exp(score' − score)}`; proposals larger than the size cap are
/// rejected outright. States `u_{T₀+1} … u_{T₀+T}` are averaged.
pub fn mh_aggregate(
    candidates: &CandidateSet,
    ctx: &ScoreContext<'_>,
    config: &MhConfig,
    cache: &mut FitCache,
) -> Result<AggregateEstimate> {
    if candidates.is_empty() {
        return invalid("the chain needs at least one candidate feature");
    }
    if config.iterations == 0 {
        return invalid("iterations must be at least 1");
    }
    let cap = default_cap(candidates, ctx);
    let max_size = match config.max_pattern_size {
        Some(0) => return invalid("max pattern size must be positive"),
        Some(m) if m > cap => return invalid(format!("max pattern size {m} exceeds the limit {cap}")),
        Some(m) => m,
        None => cap,
    };
    if max_size == 0 {
        return invalid("training subsample too small for any nonempty pattern");
    }
    let p = ctx.train.p();
    let feats = candidates.features();
    let mut rng = seed::rng(config.seed);

    let mut state = SparsityPattern::empty(p);
    let mut current = ctx.scored(&state, cache)?.score;
    let total = config.burnin + config.iterations;
    let mut trace = Vec::with_capacity(total);
    let mut visits: BTreeMap<SparsityPattern, usize> = BTreeMap::new();
    let mut accepted_count = 0;

    for t in 0..total {
        let j = feats[rng.random_range(0..feats.len())];
        let proposal = state.flipped(j);
        let mut accepted = false;
        if proposal.count() <= max_size {
            let proposed = ctx.scored(&proposal, cache)?.score;
            let delta = proposed - current;
            let r: f64 = rng.random();
            if delta >= 0.0 || r < delta.exp() {
                state = proposal;
                current = proposed;
                accepted = true;
                accepted_count += 1;
            }
        }
        trace.push(TraceStep {
            iteration: t + 1,
            pattern_size: state.count(),
            accepted,
            score: current,
        });
        if t >= config.burnin {
            *visits.entry(state.clone()).or_insert(0) += 1;
        }
    }

    let mut theta = vec![0.0; p];
    let mut intercept = 0.0;
    for (pattern, &count) in &visits {
        let model = &cache.get(pattern).expect("visited patterns are cached").model;
        for j in pattern.indices() {
            theta[j] += count as f64 * model.theta[j];
        }
        intercept += count as f64 * model.intercept;
    }
    let denom = config.iterations as f64;
    for v in &mut theta {
        *v /= denom;
    }
    intercept /= denom;

    Ok(AggregateEstimate {
        theta,
        intercept,
        trace,
        acceptance_rate: accepted_count as f64 / total as f64,
        visit_counts: visits,
        models_fitted: cache.models_fitted(),
        max_pattern_size: max_size,
    })
}
