//! Exponentially weighted aggregation of constrained logistic fits.
//!
//! Each sparsity pattern `m` gets the fit `θ̂_m` on the estimation subsample
//! and the score `l(θ̂_m; validation) + ln π_m`; the aggregate is the
//! softmax-weighted average of the fits. [`exact_aggregate`] enumerates the
//! model space, [`mh_aggregate`] approximates it with a random walk on the
//! hypercube, and [`la_fit`] runs the whole pipeline.

mod candidates;
mod exact;
mod mh;
mod pipeline;
mod prior;
mod score;
mod weights;

pub use candidates::{CandidateSet, CandidateSource};
pub use exact::{exact_aggregate, ExactAggregate, MAX_EXACT_CANDIDATES};
pub use mh::{mh_aggregate, AggregateEstimate, MhConfig, TraceStep};
pub use pipeline::{l1cv_support, la_fit, screen_candidates, LaConfig, LaFit, PriorMode, Screen};
pub use prior::{log_prior_size, log_prior_unnorm, PriorSpec};
pub use score::{score, FitCache, ScoreContext, ScoredModel};
pub use weights::{compute_weights, kl_objective, log_acceptance};
