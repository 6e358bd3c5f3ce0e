use crate::data::Dataset;
use crate::error::{Error, Result};

/// Logistic function, evaluated on the branch that cannot overflow.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
pub fn log1pexp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Contribution `y·z − ln(1 + e^z)` of one observation with linear
/// predictor `z`.
#[inline]
pub fn loglik_term(y: f64, z: f64) -> f64 {
    y * z - log1pexp(z)
}

fn check_dim(theta: &[f64], data: &Dataset) -> Result<()> {
    if theta.len() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: data.p(),
            found: theta.len(),
        });
    }
    Ok(())
}

pub(crate) fn linear_predictor(intercept: f64, theta: &[f64], row: &[f64]) -> f64 {
    intercept + row.iter().zip(theta).map(|(x, t)| x * t).sum::<f64>()
}

/// Logistic log-likelihood of `theta` (no intercept) on `data`.
pub fn log_likelihood(theta: &[f64], data: &Dataset) -> Result<f64> {
    log_likelihood_with_intercept(0.0, theta, data)
}

pub fn log_likelihood_with_intercept(intercept: f64, theta: &[f64], data: &Dataset) -> Result<f64> {
    check_dim(theta, data)?;
    Ok((0..data.n())
        .map(|i| loglik_term(data.label(i), linear_predictor(intercept, theta, data.row(i))))
        .sum())
}

/// Gradient of [`log_likelihood`]: `Σ_i (y_i − σ(θᵀx_i)) x_i`.
pub fn log_likelihood_grad(theta: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    check_dim(theta, data)?;
    let mut grad = vec![0.0; data.p()];
    for i in 0..data.n() {
        let row = data.row(i);
        let resid = data.label(i) - sigmoid(linear_predictor(0.0, theta, row));
        for (g, x) in grad.iter_mut().zip(row) {
            *g += resid * x;
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(3f64.ln()) - 0.75).abs() < 1e-15);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        for z in [-50.0, -3.3, -0.1, 0.7, 12.0, 49.9] {
            assert!((sigmoid(-z) - (1.0 - sigmoid(z))).abs() < 1e-15);
        }
    }

    #[test]
    fn log1pexp_is_finite_at_extremes() {
        assert_eq!(log1pexp(1000.0), 1000.0);
        assert_eq!(log1pexp(-1000.0), 0.0);
        assert!((log1pexp(0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_theta_and_single_row() {
        let d = Dataset::with_default_names(vec![1.0, -2.0, 0.5, 3.0], vec![1, 0, 1, 1], 1).unwrap();
        let ll = log_likelihood(&[0.0], &d).unwrap();
        assert!((ll + 4.0 * 2f64.ln()).abs() < 1e-14);

        let one = Dataset::with_default_names(vec![1.0], vec![1], 1).unwrap();
        let ll = log_likelihood(&[2.0], &one).unwrap();
        assert!((ll - (2.0 - (1.0 + 2f64.exp()).ln())).abs() < 1e-14);
        assert!(log_likelihood(&[1.0, 2.0], &one).is_err());
        assert!(log_likelihood_grad(&[], &one).is_err());
    }

    #[test]
    fn gradient_at_zero_is_centered_cross_product() {
        let x = vec![1.0, -1.0, 2.0, 0.5, -3.0, 0.5, 0.0, 0.0];
        let d = Dataset::with_default_names(x.clone(), vec![1, 0, 1, 0], 2).unwrap();
        let g = log_likelihood_grad(&[0.0, 0.0], &d).unwrap();
        for j in 0..2 {
            let expected: f64 = (0..4).map(|i| (d.label(i) - 0.5) * x[i * 2 + j]).sum();
            assert!((g[j] - expected).abs() < 1e-14);
        }
    }
}
