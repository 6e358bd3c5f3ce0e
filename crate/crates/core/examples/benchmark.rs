//! Desk-scale method comparison on simulated data.
//!
//! ```text
//! cargo run --release --example benchmark -- [reps] [p]
//! ```

use logagg::bench::{run_benchmark, BenchConfig, Method};
use logagg::simgen::{CovarianceModel, ScenarioSpec};

fn main() -> logagg::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().map_or(3, |s| s.parse().expect("reps"));
    let p: usize = args.next().map_or(1000, |s| s.parse().expect("p"));

    let scenarios = [CovarianceModel::Independent, CovarianceModel::ar1(), CovarianceModel::ar2()]
        .into_iter()
        .map(|m| ScenarioSpec::new(m, 300, p, 0))
        .collect();
    let cfg = BenchConfig {
        scenarios,
        methods: vec![Method::La, Method::Lr, Method::L1Lr],
        reps,
        base_seed: 7,
        ..BenchConfig::default()
    };
    let t = std::time::Instant::now();
    let report = run_benchmark(&cfg)?;

    println!("{:<6} {:<5} {:>14} {:>14} {:>14} {:>10}", "model", "meth", "AUC", "FP", "FN", "sec");
    for row in &report.summary {
        println!(
            "{:<6} {:<5} {:>7.3}±{:<6.3} {:>7.2}±{:<6.2} {:>7.2}±{:<6.2} {:>10.2}",
            row.model, row.method.name(), row.auc.mean, row.auc.se, row.fp.mean, row.fp.se,
            row.fn_count.mean, row.fn_count.se, row.time.mean,
        );
    }
    println!("total {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
