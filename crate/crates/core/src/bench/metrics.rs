use crate::error::{invalid, Error, Result};
use crate::simgen::TrueCoefficients;

/// Area under the ROC curve as the Mann–Whitney statistic: the share of
/// positive/negative pairs ranked correctly, ties counting one half.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return invalid("scores must be finite");
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return invalid("AUC needs at least one positive and one negative label");
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // midranks (1-based) summed over the positives
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let midrank = (start + end + 1) as f64 / 2.0;
        let tied_pos = order[start..end].iter().filter(|&&i| labels[i] == 1).count();
        rank_sum += midrank * tied_pos as f64;
        start = end;
    }
    let (pos, neg) = (pos as f64, neg as f64);
    Ok((rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg))
}

/// Whether feature `j` counts as selected: `|θ̂_j| > 1/n`.
pub fn is_selected(value: f64, n: usize) -> bool {
    value.abs() > 1.0 / n as f64
}

/// `(false positives, false negatives)` of the selection `|θ̂_j| > 1/n`
/// against the true support.
pub fn fp_fn(theta_hat: &[f64], truth: &TrueCoefficients, n: usize) -> (usize, usize) {
    assert_eq!(theta_hat.len(), truth.theta.len(), "coefficient length mismatch");
    let mut fp = 0;
    let mut fn_count = 0;
    for (j, &v) in theta_hat.iter().enumerate() {
        let selected = is_selected(v, n);
        let relevant = truth.theta[j] != 0.0;
        match (selected, relevant) {
            (true, false) => fp += 1,
            (false, true) => fn_count += 1,
            _ => {}
        }
    }
    (fp, fn_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::true_theta;

    #[test]
    fn auc_cases() {
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(auc(&[0.9, 0.8, 0.3], &[1, 0, 1]).unwrap(), 0.5);
        assert_eq!(auc(&[0.4; 6], &[1, 0, 1, 0, 0, 1]).unwrap(), 0.5);
        assert!(auc(&[0.1, 0.2], &[1, 1]).is_err());
        assert!(auc(&[0.1], &[1, 0]).is_err());
    }

    #[test]
    fn selection_counts() {
        let truth = true_theta(10).unwrap();
        assert_eq!(fp_fn(&truth.theta, &truth, 300), (0, 0));
        let mut est = truth.theta.clone();
        est[5] = 0.01;
        assert_eq!(fp_fn(&est, &truth, 300), (1, 0));
        assert_eq!(fp_fn(&[0.0; 10], &truth, 300), (0, 5));
    }
}
