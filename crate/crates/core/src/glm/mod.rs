//! Logistic-model computations: likelihood, constrained and penalized
//! fitting, cross-validation and marginal tests.

mod cv;
mod likelihood;
mod marginal;
mod newton;
mod penalized;

pub use cv::{cross_validate, fold_assignment, CvResult, CvScore};
pub use likelihood::{
    log1pexp, log_likelihood, log_likelihood_grad, log_likelihood_with_intercept, loglik_term, sigmoid,
};
pub use marginal::{bonferroni_select, retain_by_pvalue, single_locus_pvalues, wald_p_value, MarginalTestResult};
pub use newton::{fit_constrained_mle, fit_constrained_mle_path, pattern_cap, FitOptions, FittedModel};
pub use penalized::{fit_penalized, lambda_path, PenalizedFit, PenalizedOptions, PenalizedSolver, PenaltySpec};

pub(crate) use likelihood::linear_predictor;
pub(crate) use penalized::log_grid as penalized_grid;
