//! Draws the three covariate designs and writes one of them to CSV.
//!
//! ```text
//! cargo run --example simulate -- [out.csv]
//! ```

use logagg::csvio::{load_csv, write_csv};
use logagg::simgen::{simulate, true_theta, CovarianceModel, ScenarioSpec};

fn main() -> logagg::Result<()> {
    let truth = true_theta(200)?;
    for model in [CovarianceModel::Independent, CovarianceModel::ar1(), CovarianceModel::ar2()] {
        let data = simulate(&ScenarioSpec::new(model, 500, 200, 42), &truth)?;
        let c01 = correlation(&data.column(0), &data.column(1));
        let c02 = correlation(&data.column(0), &data.column(2));
        println!(
            "{model:<6} cases {:>3}/{}  corr(x0,x1) {c01:+.3}  corr(x0,x2) {c02:+.3}",
            data.positives(),
            data.n()
        );
    }

    let path = std::env::args().nth(1).unwrap_or_else(|| "simulated.csv".into());
    let data = simulate(&ScenarioSpec::new(CovarianceModel::ar1(), 100, 20, 7), &true_theta(20)?)?;
    write_csv(&path, &data, "y", &["simulated ar1 design".to_string()])?;
    assert_eq!(load_csv(&path, "y")?, data);
    println!("wrote {path} ({} x {}), read back identically", data.n(), data.p());
    Ok(())
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
