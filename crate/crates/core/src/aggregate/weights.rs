//! Exponential weights and the entropy-regularized objective they solve.

use crate::error::{invalid, Error, Result};

/// Softmax with max-subtraction.
pub fn compute_weights(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return invalid("cannot weight an empty score list");
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return invalid("scores must be finite");
    }
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = scores.iter().map(|s| (s - top).exp()).collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    Ok(w)
}

/// `Σ λ_m·l_m − Σ λ_m·ln(λ_m / π_m)` with unnormalized log-priors; zero
/// weights contribute nothing.
///
/// The softmax of `l_m + ln π_m` is its unique maximizer over the simplex.
pub fn kl_objective(weights: &[f64], logliks: &[f64], log_priors: &[f64]) -> Result<f64> {
    if weights.len() != logliks.len() || weights.len() != log_priors.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: logliks.len().min(log_priors.len()),
        });
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return invalid("weights must be nonnegative and finite");
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return invalid(format!("weights sum to {total}, not 1"));
    }
    Ok(weights
        .iter()
        .zip(logliks)
        .zip(log_priors)
        .filter(|((&w, _), _)| w > 0.0)
        .map(|((&w, &l), &lp)| w * l - w * (w.ln() - lp))
        .sum())
}

/// Log Metropolis acceptance probability `min(0, s' − s)` for a symmetric
/// proposal.
pub fn log_acceptance(current: f64, proposed: f64) -> f64 {
    (proposed - current).min(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_cases() {
        assert_eq!(compute_weights(&[-3.0]).unwrap(), vec![1.0]);
        assert_eq!(compute_weights(&[7.0, 7.0]).unwrap(), vec![0.5, 0.5]);
        for c in [-1e4, -3.0, 0.0, 250.0, 1e5] {
            let w = compute_weights(&[2f64.ln() + c, c]).unwrap();
            assert!((w[0] - 2.0 / 3.0).abs() < 1e-12 && (w[1] - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(compute_weights(&[]).is_err());
        assert!(compute_weights(&[f64::NAN]).is_err());
    }

    #[test]
    fn objective_rejects_off_simplex() {
        assert!(kl_objective(&[0.5, 0.6], &[0.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(kl_objective(&[-0.1, 1.1], &[0.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(kl_objective(&[1.0], &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn uniform_maximizes_under_symmetry() {
        let l = [1.5; 4];
        let lp = [-2.0; 4];
        let uniform = kl_objective(&[0.25; 4], &l, &lp).unwrap();
        let skewed = kl_objective(&[0.4, 0.2, 0.2, 0.2], &l, &lp).unwrap();
        let vertex = kl_objective(&[1.0, 0.0, 0.0, 0.0], &l, &lp).unwrap();
        assert!(uniform > skewed && skewed > vertex);
    }

    #[test]
    fn acceptance_clamp() {
        assert_eq!(log_acceptance(-5.0, -1.0), 0.0);
        assert_eq!(log_acceptance(-1.0, -5.0), -4.0);
    }
}
