//! Sparse logistic regression by aggregation of sub-model estimators.
//!
//! The data are split in two. Constrained maximum-likelihood fits are
//! computed on the first half for sparsity patterns over a screened set of
//! candidate features, and averaged with exponential weights driven by their
//! log-likelihood on the second half and a prior favouring small patterns.
//! A Metropolis–Hastings walk over the patterns approximates the average
//! when the model space is too large to enumerate.
//!
//! Module map:
//!
//! - [`data`], [`csvio`]: datasets, sparsity patterns, sample splitting, CSV.
//! - [`glm`]: likelihood, Newton fits per pattern, lasso / elastic net with
//!   cross-validation, single-feature Wald tests.
//! - [`aggregate`]: prior, weights, exact and MCMC aggregation, pipeline.
//! - [`simgen`]: simulated designs and responses.
//! - [`bench`]: AUC / FP / FN metrics and the replicated benchmark.
//! - [`cli`]: the `logagg` command line.
//!
//! ```no_run
//! use logagg::aggregate::{la_fit, LaConfig};
//! use logagg::simgen::{simulate, true_theta, CovarianceModel, ScenarioSpec};
//!
//! let spec = ScenarioSpec::new(CovarianceModel::Independent, 300, 1000, 7);
//! let data = simulate(&spec, &true_theta(1000)?)?;
//! let fit = la_fit(&data, &LaConfig { seed: 7, ..Default::default() })?;
//! println!("selected: {:?}", fit.estimate.support());
//! # Ok::<(), logagg::Error>(())
//! ```

pub mod aggregate;
pub mod bench;
pub mod cli;
pub mod csvio;
pub mod data;
mod error;
pub mod glm;
pub mod seed;
pub mod simgen;

pub use data::{Dataset, SparsityPattern, SplitSpec};
pub use error::{Error, Result};
