//! Lasso and elastic-net paths with cross-validated tuning.

use logagg::glm::{cross_validate, fit_penalized, lambda_path, PenalizedOptions, PenaltySpec};
use logagg::simgen::{simulate, true_theta, CovarianceModel, ScenarioSpec};

fn main() -> logagg::Result<()> {
    let p = 500;
    let data = simulate(&ScenarioSpec::new(CovarianceModel::Independent, 300, p, 21), &true_theta(p)?)?;
    let opts = PenalizedOptions::default();

    let grid = lambda_path(&data, 1.0, 12, 0.01, false);
    println!("{:>9} {:>8}", "lambda", "nonzero");
    for &lambda in &grid {
        let fit = fit_penalized(&data, &PenaltySpec::lasso(lambda), &opts)?;
        println!("{lambda:>9.5} {:>8}", fit.support().len());
    }

    let alphas = [0.5, 1.0];
    let cv = cross_validate(&data, &grid, &alphas, 10, 3, &opts)?;
    let best = cv.best;
    let fit = fit_penalized(&data, &best, &opts)?;
    println!(
        "10-fold CV picks lambda {:.5}, alpha {}: {} features, first five {:?}",
        best.lambda,
        best.alpha,
        fit.support().len(),
        &fit.theta[..5].iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
    Ok(())
}
