use crate::data::SparsityPattern;

/// Sparsity prior `π_m ∝ (k / (2·e·p))^k` with `k = |m|₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriorSpec {
    /// The `p` inside the prior formula.
    pub p_effective: usize,
}

impl PriorSpec {
    pub fn new(p_effective: usize) -> Self {
        assert!(p_effective >= 1, "prior needs p_effective >= 1");
        Self { p_effective }
    }

    pub fn log_unnorm(&self, k: usize) -> f64 {
        log_prior_size(k, self.p_effective)
    }
}

/// `k·(ln k − ln(2·e·p))`, and 0 for `k = 0`. The normalizer is omitted:
/// it cancels in every ratio and softmax.
pub fn log_prior_size(k: usize, p_effective: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    k * (k.ln() - (2.0 * std::f64::consts::E * p_effective as f64).ln())
}

pub fn log_prior_unnorm(pattern: &SparsityPattern, prior: &PriorSpec) -> f64 {
    debug_assert!(pattern.count() <= prior.p_effective);
    prior.log_unnorm(pattern.count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(log_prior_size(0, 10), 0.0);
        assert!((log_prior_size(1, 10) + (1.0 + 20f64.ln())).abs() < 1e-14);
        let p = SparsityPattern::from_indices(10, &[2, 5]).unwrap();
        let expected = 2.0 * (2f64.ln() - (20.0 * std::f64::consts::E).ln());
        assert!((log_prior_unnorm(&p, &PriorSpec::new(10)) - expected).abs() < 1e-14);
    }
}
